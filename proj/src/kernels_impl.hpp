#pragma once

#include "indnet/kernels.hpp"

namespace indnet::kernels::detail {

template <typename T>
const KernelTable<T>& scalar_table() noexcept;

#if defined(INDNET_HAVE_AVX2)
template <typename T>
const KernelTable<T>& avx2_table() noexcept;
#endif

#if defined(INDNET_HAVE_NEON)
template <typename T>
const KernelTable<T>& neon_table() noexcept;
#endif

}  // namespace indnet::kernels::detail
