/**
 * @file legendre.hpp
 * @brief Gauss-Legendre quadrature nodes and orthonormal associated
 *        Legendre function tables used by the spherical transforms.
 */
#ifndef MPE_LEGENDRE_HPP
#define MPE_LEGENDRE_HPP

#include <cstddef>
#include <vector>

namespace mpe {

/// Gauss-Legendre rule on [-1, 1]: n nodes (descending in x, i.e. north to
/// south in colatitude) and weights summing to 2.
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

/// Computes the n-point Gauss-Legendre rule by Newton iteration on P_n.
/// Nodes are accurate to ~1e-15; weights follow from the derivative.
GaussLegendre gauss_legendre(int n);

/**
 * Tables of orthonormal associated Legendre functions Ptilde_l^m(cos theta)
 * and their colatitude derivatives d/dtheta Ptilde_l^m at a fixed set of
 * latitude nodes.
 *
 * Normalization: Y_lm = Ptilde_l^m(cos theta) * exp(i m phi) has unit L2
 * norm on the unit sphere. No Condon-Shortley phase.
 *
 * Degrees run l = m..lmax for each order m = 0..lmax. The derivative table
 * is built from the recurrence
 *   sin(theta) d/dx Ptilde_l^m = l eps_{l+1,m} Ptilde_{l+1}^m
 *                                - (l+1) eps_{l,m} Ptilde_{l-1}^m
 * with eps_{l,m} = sqrt((l^2 - m^2)/(4 l^2 - 1)), so internally the tables
 * extend one degree past lmax.
 */
class LegendreTable {
public:
    LegendreTable(int lmax, const std::vector<double>& x_nodes);

    int lmax() const { return lmax_; }
    int n_nodes() const { return static_cast<int>(n_nodes_); }

    /// Ptilde_l^m at node j.
    double plm(int l, int m, int j) const { return double(val_[index(l, m)][j]); }
    /// d/dtheta Ptilde_l^m at node j.
    double dplm(int l, int m, int j) const { return double(der_[index(l, m)][j]); }

    /// Contiguous row of Ptilde_l^m over all nodes. Rows keep the extended
    /// precision of the construction so quadratures against them do not pick
    /// up a storage rounding amplified by l(l+1).
    const std::vector<long double>& plm_row(int l, int m) const { return val_[index(l, m)]; }
    const std::vector<long double>& dplm_row(int l, int m) const { return der_[index(l, m)]; }

private:
    std::size_t index(int l, int m) const;

    int lmax_;
    std::size_t n_nodes_;
    std::vector<std::vector<long double>> val_;
    std::vector<std::vector<long double>> der_;
};

} // namespace mpe

#endif
