#pragma once

// Closure-approximation spin-orbit Hamiltonian on the four-fold conduction
// band minimum manifold. The point of this module is structural: the
// effective Hamiltonian commutes with the spin projection along the wire
// axis, whatever the orbital operators are.
//
// Orbital operators carry hbar, so they are in energy units and the second
// order term is L^2 / delta_E.

#include "nvstirap/core.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <random>

namespace nvstirap::spinorbit {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using OrbitalOps = std::array<Matrix, 3>;

inline constexpr int orbital_dim = 4;
inline constexpr double hermitian_tolerance = 1e-12;

/// Spin-1/2 s_z in units of hbar.
inline Matrix spin_z()
{
    Matrix s = Matrix::Zero(2, 2);
    s(0, 0) = 0.5;
    s(1, 1) = -0.5;
    return s;
}

inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline double relative_anti_hermiticity(const Matrix& m)
{
    const double scale = std::max(m.norm(), 1e-300);
    return (m - m.adjoint()).norm() / scale;
}

inline bool is_hermitian(const Matrix& m, double tol = hermitian_tolerance)
{
    return m.rows() == m.cols() && (m.norm() == 0.0 || relative_anti_hermiticity(m) <= tol);
}

struct EffectiveSOHamiltonian {
    OrbitalOps L_ops{Matrix::Zero(orbital_dim, orbital_dim),
                     Matrix::Zero(orbital_dim, orbital_dim),
                     Matrix::Zero(orbital_dim, orbital_dim)};
    double delta_E = 10e-3 * si::eV;     ///< closure denominator (test value)
    double lambda_par_1 = 1e-6 * si::eV; ///< first-order E_u splitting (test value)

    void validate() const
    {
        if (!(delta_E > 0.0))
            throw ConfigError("closure energy denominator must be positive");
        for (const auto& L : L_ops) {
            if (L.rows() != orbital_dim || L.cols() != orbital_dim)
                throw ConfigError("orbital operators must be 4 x 4");
            if (!is_hermitian(L))
                throw ConfigError("orbital operators must be Hermitian");
        }
    }
};

/// Second-order closure term on orbital (x) spin space:
/// (1/dE) [ (1/4) sum L_i^2 (x) I + (i/2) [L_x, L_y] (x) s_z ].
inline Matrix build_second_order(const OrbitalOps& L, double delta_E)
{
    if (!(delta_E > 0.0))
        throw ConfigError("closure energy denominator must be positive");
    const auto n = L[0].rows();
    for (const auto& op : L)
        if (op.rows() != n || op.cols() != n || !is_hermitian(op))
            throw ConfigError("orbital operators must be square, equal-sized and Hermitian");

    const Matrix squares = L[0] * L[0] + L[1] * L[1] + L[2] * L[2];
    const Matrix commutator = L[0] * L[1] - L[1] * L[0];
    const Matrix id_s = Matrix::Identity(2, 2);
    const cplx half_i(0.0, 0.5);
    return (kron(0.25 * squares, id_s) + kron(half_i * commutator, spin_z())) / delta_E;
}

/// First-order term on the E_u (x) spin subspace, written in the product
/// basis {E_u1, E_u2} (x) {up, down}: lambda l_z (x) sigma_z with
/// l_z = [[0, -i], [i, 0]]. In the spin-orbit-coupled basis it is
/// lambda (|E_u+><E_u+| - |E_u-><E_u-|), eigenvalues +-lambda, each twice.
inline Matrix build_first_order(double lambda_par_1)
{
    Matrix lz = Matrix::Zero(2, 2);
    lz(0, 1) = cplx(0.0, -1.0);
    lz(1, 0) = cplx(0.0, 1.0);
    return lambda_par_1 * kron(lz, 2.0 * spin_z());
}

/// Embeds the E_u block into the full manifold, orbital order
/// {E_u1, E_u2, A1g, B1g}.
inline Matrix embed_first_order(const Matrix& eu_block)
{
    Matrix out = Matrix::Zero(2 * orbital_dim, 2 * orbital_dim);
    out.topLeftCorner(4, 4) = eu_block;
    return out;
}

inline Matrix total_hamiltonian(const EffectiveSOHamiltonian& h)
{
    h.validate();
    return embed_first_order(build_first_order(h.lambda_par_1)) +
           build_second_order(h.L_ops, h.delta_E);
}

/// ||[H, I (x) s_z]|| / ||H|| (Frobenius); zero for a zero H.
inline double spin_commutator_norm(const Matrix& H)
{
    const Matrix Sz = kron(Matrix::Identity(H.rows() / 2, H.cols() / 2), spin_z());
    const double scale = H.norm();
    if (scale == 0.0)
        return 0.0;
    return (H * Sz - Sz * H).norm() / scale;
}

/// Random Hermitian orbital operators with unit-variance Gaussian entries,
/// scaled to energy `scale`.
inline OrbitalOps random_orbital_ops(std::mt19937_64& rng, double scale = 1e-3 * si::eV)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    OrbitalOps ops;
    for (auto& L : ops) {
        Matrix a(orbital_dim, orbital_dim);
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                a(i, j) = cplx(normal(rng), normal(rng));
        L = 0.5 * scale * (a + a.adjoint());
    }
    return ops;
}

struct SpinCheckResult {
    int instances = 0;
    double max_relative_commutator = 0.0;
    double max_anti_hermiticity = 0.0;
};

/// Builds `instances` seeded random Hamiltonians and reports the worst spin
/// commutator.
inline SpinCheckResult spin_check(std::uint64_t seed, int instances,
                                  double delta_E = 10e-3 * si::eV,
                                  double lambda_par_1 = 1e-6 * si::eV)
{
    if (instances < 1)
        throw ConfigError("spin check needs at least one instance");
    std::mt19937_64 rng(seed);
    SpinCheckResult out;
    out.instances = instances;
    for (int k = 0; k < instances; ++k) {
        EffectiveSOHamiltonian h{random_orbital_ops(rng), delta_E, lambda_par_1};
        const Matrix H = total_hamiltonian(h);
        out.max_relative_commutator =
            std::max(out.max_relative_commutator, spin_commutator_norm(H));
        out.max_anti_hermiticity =
            std::max(out.max_anti_hermiticity, relative_anti_hermiticity(H));
    }
    return out;
}

} // namespace nvstirap::spinorbit
