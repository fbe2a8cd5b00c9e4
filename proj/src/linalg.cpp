#include "ocran/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ocran {

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double hermitian_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& m, double tol) {
  return m.rows() == m.cols() && hermitian_defect(m) <= tol;
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).minCoeff(); }
double max_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).maxCoeff(); }

double logdet_psd(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  CMatrix h = hermitian_part(m);
  Eigen::LLT<CMatrix> llt(h);
  if (llt.info() == Eigen::Success) {
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    bool ok = true;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      double d = l(i, i).real();
      if (!(d > 1e-7)) {
        ok = false;
        break;
      }
      acc += 2.0 * std::log(d);
    }
    if (ok) return acc;
  }
  Eigen::VectorXd ev = hermitian_eigenvalues(h);
  double acc = 0.0;
  for (double e : ev) acc += std::log(std::max(e, 1e-14));
  return acc;
}

namespace {

template <typename F>
CMatrix spectral_map(const CMatrix& m, F f) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  Eigen::VectorXd d = es.eigenvalues().unaryExpr(f);
  const CMatrix& v = es.eigenvectors();
  CMatrix out = v * d.cast<std::complex<double>>().asDiagonal() * v.adjoint();
  return hermitian_part(out);
}

}  // namespace

CMatrix sqrt_psd(const CMatrix& m) {
  if (m.size() == 0) return m;
  return spectral_map(m, [](double e) { return std::sqrt(std::max(e, 0.0)); });
}

CMatrix inv_sqrt_pd(const CMatrix& m) {
  if (m.size() == 0) return m;
  return spectral_map(m, [](double e) { return 1.0 / std::sqrt(e); });
}

CMatrix clip_eigenvalues(const CMatrix& m, double lo, double hi) {
  if (m.size() == 0) return m;
  return spectral_map(m, [lo, hi](double e) { return std::clamp(e, lo, hi); });
}

CMatrix block_diagonal(std::span<const CMatrix> blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  CMatrix out = CMatrix::Zero(rows, cols);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

}  // namespace ocran
