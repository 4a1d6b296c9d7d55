#pragma once

// Data-parallel inner loops shared by the sampler, the decision layer, the
// logistic fitter and the evaluators. Each kernel has a scalar reference and
// an AVX2 variant; the variant is picked once at startup from the CPU's
// capabilities and can be pinned with ITR_ISA=scalar|avx2.
//
// Elementwise kernels round identically in every variant (no FMA contraction,
// IEEE sqrt). Reductions (dot, sum) reassociate and agree only to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace itr::kernels {

enum class Isa { scalar, avx2 };

struct Table {
    Isa isa;

    // out[i] = latent[i] - (total[i] - tree[i])
    void (*partial_residual)(const double* latent, const double* total, const double* tree,
                             double* out, std::size_t n);
    // total[i] = total[i] + (fresh[i] - stale[i])
    void (*apply_delta)(double* total, const double* fresh, const double* stale, std::size_t n);
    // Joint potential-outcome cells from marginals p1 = P(Y(1)=1), p0 = P(Y(0)=1).
    void (*joint_po)(const double* p1, const double* p0, double rho, double* t11, double* t10,
                     double* t01, double* t00, std::size_t n);
    // out[i] = l[0]*t00[i] + l[1]*t01[i] + l[2]*t10[i] + l[3]*t11[i], summed left to right.
    void (*expected_loss)(const double* t00, const double* t01, const double* t10,
                          const double* t11, const double* l, double* out, std::size_t n);
    // counts[i] += (a[i] < b[i])
    void (*count_less)(const double* a, const double* b, double* counts, std::size_t n);
    // y[i] = y[i] + a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
};

const Table& scalar_table();
bool avx2_available();
// AVX2 table; falls back to the scalar table when the CPU lacks AVX2.
const Table& avx2_table();
const Table& table(Isa isa);

// Table selected for this process.
const Table& active();
std::string_view isa_name(Isa isa);

inline void partial_residual(std::span<const double> latent, std::span<const double> total,
                             std::span<const double> tree, std::span<double> out) {
    active().partial_residual(latent.data(), total.data(), tree.data(), out.data(), out.size());
}
inline void apply_delta(std::span<double> total, std::span<const double> fresh,
                        std::span<const double> stale) {
    active().apply_delta(total.data(), fresh.data(), stale.data(), total.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), y.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

}  // namespace itr::kernels
