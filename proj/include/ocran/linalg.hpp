#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace ocran {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kLn2 = 0.69314718055994530942;

inline double nats_to_bits(double nats) { return nats / kLn2; }

CMatrix hermitian_part(const CMatrix& m);

// max |m - m^H| entrywise.
double hermitian_defect(const CMatrix& m);

bool is_hermitian(const CMatrix& m, double tol = 1e-10);

// Ascending eigenvalues of the Hermitian part of m.
Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m);

double min_eigenvalue(const CMatrix& m);
double max_eigenvalue(const CMatrix& m);

// Natural log-determinant of a PSD matrix. Cholesky on the Hermitian part;
// falls back to eigenvalues clipped below at 1e-14 if Cholesky fails.
double logdet_psd(const CMatrix& m);

// Principal square root of a PSD matrix (negative eigenvalues clipped to 0).
CMatrix sqrt_psd(const CMatrix& m);

// Inverse principal square root of a PD matrix.
CMatrix inv_sqrt_pd(const CMatrix& m);

// Hermitian matrix with eigenvalues clamped into [lo, hi].
CMatrix clip_eigenvalues(const CMatrix& m, double lo, double hi);

CMatrix block_diagonal(std::span<const CMatrix> blocks);

CMatrix identity(Eigen::Index n);

}  // namespace ocran
