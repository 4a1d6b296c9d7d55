#include <cmath>

#include "itr/kernels/kernels.hpp"

namespace itr::kernels {
namespace {

void partial_residual(const double* latent, const double* total, const double* tree, double* out,
                      std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = latent[i] - (total[i] - tree[i]);
}

void apply_delta(double* total, const double* fresh, const double* stale, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) total[i] = total[i] + (fresh[i] - stale[i]);
}

void joint_po(const double* p1, const double* p0, double rho, double* t11, double* t10,
              double* t01, double* t00, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = p1[i] * (1.0 - p1[i]);
        const double b = p0[i] * (1.0 - p0[i]);
        const double both = rho * std::sqrt(a * b) + p1[i] * p0[i];
        const double only1 = p1[i] - both;
        const double only0 = p0[i] - both;
        t11[i] = both;
        t10[i] = only1;
        t01[i] = only0;
        t00[i] = ((1.0 - both) - only1) - only0;
    }
}

void expected_loss(const double* t00, const double* t01, const double* t10, const double* t11,
                   const double* l, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = ((l[0] * t00[i] + l[1] * t01[i]) + l[2] * t10[i]) + l[3] * t11[i];
}

void count_less(const double* a, const double* b, double* counts, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] < b[i]) counts[i] += 1.0;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

}  // namespace

const Table& scalar_table() {
    static const Table t{Isa::scalar, partial_residual, apply_delta, joint_po, expected_loss,
                         count_less,  axpy,             dot,         sum};
    return t;
}

}  // namespace itr::kernels
