#include "mpe/legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace mpe {

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendre gl;
    gl.x.resize(n);
    gl.w.resize(n);
    // Newton iteration on P_n with the usual Chebyshev-like initial guess.
    // Only the upper half is computed; the rule is symmetric.
    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        long double x = std::cos(M_PI * (k + 0.75L) / (n + 0.5L));
        long double pp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            // Three-term recurrence for P_n(x) and derivative.
            long double p0 = 1.0L, p1 = x;
            for (int l = 2; l <= n; ++l) {
                long double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0L);
            long double dx = p1 / pp;
            x -= dx;
            if (std::abs(double(dx)) < 1e-17) break;
        }
        gl.x[k] = double(x);
        gl.x[n - 1 - k] = double(-x);
        double w = double(2.0L / ((1.0L - x * x) * pp * pp));
        gl.w[k] = w;
        gl.w[n - 1 - k] = w;
    }
    if (n % 2 == 1) gl.x[half - 1] = 0.0;
    return gl;
}

namespace {

inline double eps_lm(int l, int m) {
    return std::sqrt(double(l - m) * double(l + m) / ((2.0 * l - 1.0) * (2.0 * l + 1.0)));
}

} // namespace

std::size_t LegendreTable::index(int l, int m) const {
    // Packing over m = 0..lmax+1, l = m..lmax+1 (one extra degree for the
    // derivative recurrence).
    const int lt = lmax_ + 1;
    // offset(m) = sum_{m'=0}^{m-1} (lt + 1 - m')
    return std::size_t(m) * (lt + 1) - std::size_t(m) * (m - 1) / 2 + std::size_t(l - m);
}

LegendreTable::LegendreTable(int lmax, const std::vector<double>& x_nodes)
    : lmax_(lmax), n_nodes_(x_nodes.size()) {
    if (lmax < 0) throw std::invalid_argument("LegendreTable: lmax must be >= 0");
    const int lt = lmax + 1; // tables go one degree beyond lmax
    const std::size_t rows = std::size_t(lt + 1) * (lt + 2) / 2;
    val_.assign(rows, std::vector<long double>(n_nodes_, 0.0L));
    der_.assign(rows, std::vector<long double>(n_nodes_, 0.0L));

    // Recurrences run in extended precision so that stored values are
    // accurate to the last double bit; the extra cost is construction-only.
    std::vector<long double> xs(n_nodes_), sin_t(n_nodes_);
    for (std::size_t j = 0; j < n_nodes_; ++j) {
        double x = x_nodes[j];
        if (x < -1.0 || x > 1.0)
            throw std::invalid_argument("LegendreTable: node outside [-1, 1]");
        xs[j] = x;
        sin_t[j] = std::sqrt((1.0L - xs[j]) * (1.0L + xs[j]));
    }
    auto eps = [](int l, int m) -> long double {
        return std::sqrt((long double)(l - m) * (l + m) /
                         ((2.0L * l - 1.0L) * (2.0L * l + 1.0L)));
    };
    // Diagonal seed Ptilde_m^m, then upward recurrence in l at fixed m.
    for (int m = 0; m <= lt; ++m) {
        std::vector<long double>& pmm = val_[index(m, m)];
        if (m == 0) {
            long double c = std::sqrt(1.0L / (4.0L * std::acos(-1.0L)));
            for (std::size_t j = 0; j < n_nodes_; ++j) pmm[j] = c;
        } else {
            const std::vector<long double>& prev = val_[index(m - 1, m - 1)];
            long double c = std::sqrt((2.0L * m + 1.0L) / (2.0L * m));
            for (std::size_t j = 0; j < n_nodes_; ++j) pmm[j] = c * sin_t[j] * prev[j];
        }
        if (m + 1 <= lt) {
            std::vector<long double>& pm1 = val_[index(m + 1, m)];
            long double c = std::sqrt(2.0L * m + 3.0L);
            for (std::size_t j = 0; j < n_nodes_; ++j) pm1[j] = c * xs[j] * pmm[j];
        }
        for (int l = m + 2; l <= lt; ++l) {
            const std::vector<long double>& p1 = val_[index(l - 1, m)];
            const std::vector<long double>& p2 = val_[index(l - 2, m)];
            std::vector<long double>& p = val_[index(l, m)];
            long double e_l = eps(l, m);
            long double e_l1 = eps(l - 1, m);
            for (std::size_t j = 0; j < n_nodes_; ++j)
                p[j] = (xs[j] * p1[j] - e_l1 * p2[j]) / e_l;
        }
    }
    // d/dtheta Ptilde_l^m = (1/sin) [ l eps_{l+1,m} Ptilde_{l+1}^m
    //                                 - (l+1) eps_{l,m} Ptilde_{l-1}^m ].
    // Valid at interior nodes (sin theta > 0); Gaussian grids never place
    // nodes at the poles.
    for (int m = 0; m <= lmax; ++m) {
        for (int l = m; l <= lmax; ++l) {
            std::vector<long double>& d = der_[index(l, m)];
            const std::vector<long double>& up = val_[index(l + 1, m)];
            long double cu = l * eps(l + 1, m);
            if (l - 1 >= m) {
                const std::vector<long double>& dn = val_[index(l - 1, m)];
                long double cd = (l + 1) * eps(l, m);
                for (std::size_t j = 0; j < n_nodes_; ++j)
                    d[j] = (cu * up[j] - cd * dn[j]) / sin_t[j];
            } else {
                for (std::size_t j = 0; j < n_nodes_; ++j)
                    d[j] = cu * up[j] / sin_t[j];
            }
        }
    }
}

} // namespace mpe
