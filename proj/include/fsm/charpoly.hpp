#pragma once
//============================================================================
// charpoly.hpp
//
// Characteristic polynomials of the interior operator and the stably
// anchored exponential bases built from their roots.
//
// A root eta with multiplicity m contributes the chain
//     (x - x_ref)^j exp(eta (x - x_ref)),   j = 0..m-1,
// where x_ref is the interval end on which the exponential is largest
// (right end for Re(eta) > 0, left end otherwise), so every basis entry has
// magnitude <= ~1 on the interval and growing exponentials never overflow.
//
// For full-range 2D expansions each tangential harmonic n couples the
// cosine and sine coefficient functions (xi_1n, xi_2n) through a 2x2 system
// of ODE operators with matrix
//     [ t11  t12 ]
//     [ t21  t11 ],   t21 = -t12,
// whose determinant has degree 4r.  Because of that skew structure the
// system factors over C: xi_1 + i xi_2 solves (t11 - i t12) and
// xi_1 - i xi_2 solves (t11 + i t12), which turns repeated determinant
// roots into ordinary scalar confluent chains attached to the fixed
// amplitude directions (1, -i)/sqrt(2) and (1, +i)/sqrt(2).
//============================================================================

#include "fsm/polynomial.hpp"
#include "fsm/problem.hpp"

#include <complex>
#include <vector>

namespace fsm {

struct RootCluster {
    cd value;
    int multiplicity = 1;
};

// Companion-matrix eigenvalues, greedily clustered at relative radius
// cluster_radius * (1 + max|root|), then polished by one Newton step on the
// (m-1)-th derivative for multiplicity m.  Clusters are sorted by
// (Re, Im) for determinism.
std::vector<RootCluster> find_roots(const Polynomial& p, double cluster_radius = 1e-6);

struct BasisEntry {
    cd eta;
    int power = 0;      // j in (x - x_ref)^j exp(...)
    double x_ref = 0.0;
};

// k-th derivative of the entry at x.
cd eval_entry(const BasisEntry& e, double x, int k);

struct HomogeneousBasis1D {
    std::vector<BasisEntry> entries;
    double lo = 0.0, hi = 0.0;

    // Derivative row [e_0^(k)(x), ..., e_{n-1}^(k)(x)].
    std::vector<cd> eval_row(double x, int k) const;
};

HomogeneousBasis1D build_basis(const std::vector<RootCluster>& roots, double lo, double hi);

// Characteristic polynomial sum_k a_k eta^k of a 1D operator.
Polynomial characteristic_1d(const Operator1D& op);

// x1-direction characteristic polynomial of the tangentially constant
// (n = 0) component of a full-range 2D expansion: sum_k1 a_{k1,0} eta^{k1}.
Polynomial characteristic_n0(const Operator2D& op);

//----------------------------------------------------------------------------
// Per-harmonic 2x2 ODE systems (full-range 2D, harmonic n >= 1)
//----------------------------------------------------------------------------

struct PerHarmonicSystem {
    int n = 0;
    double beta = 0.0;     // tangential wavenumber n*pi/b
    int r = 0;
    Polynomial t11;        // equals t22
    Polynomial t12;
    Polynomial t21;        // equals -t12
    Polynomial det;        // t11*t11 + t12*t12, degree 4r
};

PerHarmonicSystem per_harmonic_system(const Operator2D& op, int n, double beta);

struct AmplitudeDirection {
    cd g1, g2;
};

// Nullspace direction(s) of the 2x2 t-matrix at a determinant root: one
// direction for a rank-1 root, the two coordinate directions for decoupled
// systems (t12 == 0), and the two complex conjugate directions when both
// scalar factors share the root.
std::vector<AmplitudeDirection> amplitude_relation(const PerHarmonicSystem& sys,
                                                   const RootCluster& root);

struct VectorBasisEntry {
    BasisEntry entry;
    cd g1, g2;             // amplitude direction multiplying (xi_1, xi_2)
};

// The 4r-dimensional solution basis of the per-harmonic system on [lo, hi].
std::vector<VectorBasisEntry> system_basis(const PerHarmonicSystem& sys,
                                           double lo, double hi);

} // namespace fsm
