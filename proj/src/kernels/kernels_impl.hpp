#pragma once

#include "soline/kernels.hpp"

namespace soline::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(SOLINE_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(SOLINE_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace soline::kernels::detail
