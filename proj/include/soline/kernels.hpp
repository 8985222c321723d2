#pragma once

// Dense level-1/level-2 kernels used by the Krylov solvers and the dense
// suite objectives. Every kernel has a scalar reference implementation; wider
// variants (AVX2+FMA on x86-64, NEON on aarch64) are selected once at runtime
// from CPU capabilities and can be overridden with SOLINE_ISA=scalar|avx2|neon.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace soline::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

/// One instruction set's implementation of every kernel.
///
/// gemv takes a column-major rows x cols matrix and overwrites y with A*x.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant was not compiled for this target.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

/// Compiled in and supported by the running CPU.
bool isa_available(Isa isa) noexcept;
std::vector<Isa> available_isas();

const KernelTable& table_for(Isa isa);

/// The process-wide active table.
const KernelTable& active() noexcept;

/// Switch the active table. Throws std::invalid_argument if unavailable.
void set_active(Isa isa);

// span front-ends over the active table

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
double nrm2(std::span<const double> x);
void gemv(std::span<const double> a_colmajor, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y);

}  // namespace soline::kernels
