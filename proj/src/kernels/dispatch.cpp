#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace soline::kernels {

namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SOLINE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(SOLINE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("SOLINE_ISA"); env != nullptr) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && isa_available(isa)) return &table_for(isa);
    }
  }
  if (isa_available(Isa::avx2)) return avx2_table();
  if (isa_available(Isa::neon)) return neon_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() noexcept { return detail::kScalarTable; }

const KernelTable* avx2_table() noexcept {
#if defined(SOLINE_HAVE_AVX2)
  return &detail::kAvx2Table;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() noexcept {
#if defined(SOLINE_HAVE_NEON)
  return &detail::kNeonTable;
#else
  return nullptr;
#endif
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return avx2_table() != nullptr && cpu_has(isa);
    case Isa::neon:
      return neon_table() != nullptr && cpu_has(isa);
  }
  return false;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (isa_available(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
  }
  switch (isa) {
    case Isa::avx2:
      return *avx2_table();
    case Isa::neon:
      return *neon_table();
    case Isa::scalar:
      break;
  }
  return scalar_table();
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&table_for(isa), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same_size(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void gemv(std::span<const double> a_colmajor, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
  if (a_colmajor.size() != rows * cols) throw std::invalid_argument("gemv: matrix storage size mismatch");
  check_same_size(x.size(), cols);
  check_same_size(y.size(), rows);
  active().gemv(a_colmajor.data(), rows, cols, x.data(), y.data());
}

}  // namespace soline::kernels
