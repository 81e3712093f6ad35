#include "qtomo/povm.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qtomo/quadrature.hpp"

namespace qtomo {

namespace {

using cd = std::complex<double>;

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

CMatrix projector(const CVector& psi) { return psi * psi.adjoint(); }

int parse_suffix_int(std::string_view text, std::string_view full) {
  int value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ValidationError("unknown built-in POVM '" + std::string(full) + "'");
  return value;
}

}  // namespace

std::string_view to_string(PovmFamily family) {
  switch (family) {
    case PovmFamily::sic: return "sic";
    case PovmFamily::mub: return "mub";
    case PovmFamily::platonic: return "platonic";
    case PovmFamily::covariant: return "covariant";
    case PovmFamily::custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(PlatonicSolid solid) {
  switch (solid) {
    case PlatonicSolid::tetrahedron: return "tetrahedron";
    case PlatonicSolid::octahedron: return "octahedron";
    case PlatonicSolid::cube: return "cube";
    case PlatonicSolid::icosahedron: return "icosahedron";
    case PlatonicSolid::dodecahedron: return "dodecahedron";
  }
  return "tetrahedron";
}

PlatonicSolid parse_solid(std::string_view name) {
  for (auto solid : {PlatonicSolid::tetrahedron, PlatonicSolid::octahedron, PlatonicSolid::cube,
                     PlatonicSolid::icosahedron, PlatonicSolid::dodecahedron})
    if (name == to_string(solid)) return solid;
  throw ValidationError("unknown solid '" + std::string(name) + "'");
}

double BlochVector::norm() const noexcept { return std::sqrt(norm_squared()); }

const std::array<CMatrix, 3>& pauli_matrices() {
  static const std::array<CMatrix, 3> paulis = [] {
    CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, cd(0, -1), cd(0, 1), 0;
    sz << 1, 0, 0, -1;
    return std::array<CMatrix, 3>{sx, sy, sz};
  }();
  return paulis;
}

CMatrix bloch_state(const BlochVector& s) {
  const auto& p = pauli_matrices();
  return 0.5 * (CMatrix::Identity(2, 2) + s.x * p[0] + s.y * p[1] + s.z * p[2]);
}

BlochVector bloch_vector(const CMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw ValidationError("bloch_vector: not a qubit operator");
  const auto& p = pauli_matrices();
  return {(p[0] * rho).trace().real(), (p[1] * rho).trace().real(), (p[2] * rho).trace().real()};
}

Povm::Povm(std::vector<CMatrix> outcomes, PovmFamily family, std::string label)
    : outcomes_(std::move(outcomes)), family_(family), label_(std::move(label)) {
  if (outcomes_.empty()) throw ValidationError("POVM has no outcomes");
  dim_ = static_cast<int>(outcomes_.front().rows());
  if (dim_ < 1) throw ValidationError("POVM outcome 0 is empty");
  CMatrix total = CMatrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < outcomes_.size(); ++k) {
    const CMatrix& pi = outcomes_[k];
    const std::string where = "POVM outcome " + std::to_string(k);
    if (pi.rows() != dim_ || pi.cols() != dim_)
      throw ValidationError(where + " has the wrong shape");
    if (!is_hermitian(pi, kPovmTol)) throw ValidationError(where + " is not Hermitian");
    if (hermitian_eigenvalues(pi).minCoeff() < -kPovmTol)
      throw ValidationError(where + " is not positive semidefinite");
    total += pi;
  }
  const double dev = (total - CMatrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
  if (dev > kPovmTol)
    throw ValidationError("POVM outcomes do not sum to the identity (deviation " +
                          std::to_string(dev) + ")");

  const auto& basis = gell_mann_basis(dim_);
  kets_.reserve(outcomes_.size());
  weights_.reserve(outcomes_.size());
  for (const auto& pi : outcomes_) {
    kets_.push_back(basis.vectorize(pi));
    weights_.push_back(pi.trace().real());
  }
}

RVector Povm::probabilities(const CMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw ValidationError("state dimension does not match the POVM");
  const OperatorKet r = gell_mann_basis(dim_).vectorize(rho);
  RVector p(static_cast<Eigen::Index>(outcomes_.size()));
  for (std::size_t k = 0; k < kets_.size(); ++k) p(static_cast<Eigen::Index>(k)) = kets_[k].dot(r);
  return p;
}

std::vector<Eigen::Vector3d> platonic_vertices(PlatonicSolid solid) {
  std::vector<Eigen::Vector3d> v;
  const double phi = std::numbers::phi;
  switch (solid) {
    case PlatonicSolid::tetrahedron:
      v = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
      break;
    case PlatonicSolid::octahedron:
      v = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
      break;
    case PlatonicSolid::cube:
      for (int sx : {1, -1})
        for (int sy : {1, -1})
          for (int sz : {1, -1}) v.emplace_back(sx, sy, sz);
      break;
    case PlatonicSolid::icosahedron:
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          v.emplace_back(0, a, b * phi);
          v.emplace_back(a, b * phi, 0);
          v.emplace_back(b * phi, 0, a);
        }
      break;
    case PlatonicSolid::dodecahedron:
      for (int sx : {1, -1})
        for (int sy : {1, -1})
          for (int sz : {1, -1}) v.emplace_back(sx, sy, sz);
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          v.emplace_back(0, a / phi, b * phi);
          v.emplace_back(a / phi, b * phi, 0);
          v.emplace_back(b * phi, 0, a / phi);
        }
      break;
  }
  for (auto& x : v) x.normalize();
  return v;
}

Povm platonic_povm(PlatonicSolid solid) {
  const auto vertices = platonic_vertices(solid);
  const double n = static_cast<double>(vertices.size());
  const auto& p = pauli_matrices();
  std::vector<CMatrix> outcomes;
  outcomes.reserve(vertices.size());
  for (const auto& v : vertices)
    outcomes.push_back((CMatrix::Identity(2, 2) + v.x() * p[0] + v.y() * p[1] + v.z() * p[2]) / n);
  return Povm(std::move(outcomes), PovmFamily::platonic, std::string(to_string(solid)));
}

Povm platonic_povm(std::string_view solid) { return platonic_povm(parse_solid(solid)); }

std::optional<CVector> builtin_sic_fiducial(int dim) {
  if (dim == 2) {
    // Bloch vector (1,1,1)/sqrt(3); its Pauli orbit is the standard tetrahedron.
    const double c = 1.0 / std::sqrt(3.0);
    CVector psi(2);
    psi << std::sqrt((1.0 + c) / 2.0), std::polar(std::sqrt((1.0 - c) / 2.0), std::numbers::pi / 4);
    return psi;
  }
  if (dim == 3) {
    CVector psi(3);
    psi << 0.0, 1.0, -1.0;
    return psi / std::sqrt(2.0);
  }
  return std::nullopt;
}

Povm sic_povm(int dim, const std::optional<CVector>& fiducial) {
  if (dim < 2) throw ValidationError("SIC dimension must be at least 2");
  CVector psi;
  if (fiducial) {
    psi = *fiducial;
  } else if (auto builtin = builtin_sic_fiducial(dim)) {
    psi = *builtin;
  } else {
    throw ValidationError("no built-in SIC fiducial for dim " + std::to_string(dim) +
                          "; supply a fiducial file");
  }
  if (psi.size() != dim)
    throw ValidationError("SIC fiducial has length " + std::to_string(psi.size()) +
                          ", expected " + std::to_string(dim));
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw ValidationError("SIC fiducial is the zero vector");
  psi /= norm;

  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<CVector> orbit;
  orbit.reserve(static_cast<std::size_t>(dim * dim));
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      CVector v(dim);
      for (int j = 0; j < dim; ++j) {
        // (X^a Z^b psi)_{j} = omega^{b (j - a)} psi_{j - a}
        const int src = ((j - a) % dim + dim) % dim;
        v(j) = std::polar(1.0, two_pi * b * src / dim) * psi(src);
      }
      orbit.push_back(std::move(v));
    }
  }
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    for (std::size_t k = i; k < orbit.size(); ++k) {
      const double fid = std::norm(orbit[i].dot(orbit[k]));
      const double expected = (i == k) ? 1.0 : 1.0 / (dim + 1.0);
      if (std::abs(fid - expected) > 1e-9)
        throw ValidationError("SIC condition violated: |<psi_" + std::to_string(i) + "|psi_" +
                              std::to_string(k) + ">|^2 = " + std::to_string(fid) +
                              ", expected " + std::to_string(expected));
    }
  }
  std::vector<CMatrix> outcomes;
  outcomes.reserve(orbit.size());
  for (const auto& v : orbit) outcomes.push_back(projector(v) / static_cast<double>(dim));
  return Povm(std::move(outcomes), PovmFamily::sic, "sic" + std::to_string(dim));
}

Povm mub_povm(int dim) {
  if (!is_prime(dim)) throw ValidationError("dim not prime: " + std::to_string(dim));
  const double scale = 1.0 / (dim + 1.0);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<CMatrix> outcomes;
  outcomes.reserve(static_cast<std::size_t>(dim * (dim + 1)));
  for (int m = 0; m < dim; ++m) {
    CVector e = CVector::Zero(dim);
    e(m) = 1.0;
    outcomes.push_back(projector(e) * scale);
  }
  for (int k = 0; k < dim; ++k) {
    for (int m = 0; m < dim; ++m) {
      CVector v(dim);
      for (int j = 0; j < dim; ++j) {
        double phase;
        if (dim == 2) {
          phase = std::numbers::pi * (0.5 * k * j + m * j);
        } else {
          phase = 2.0 * std::numbers::pi * static_cast<double>((k * j * j + m * j) % dim) / dim;
        }
        v(j) = std::polar(amp, phase);
      }
      outcomes.push_back(projector(v) * scale);
    }
  }
  return Povm(std::move(outcomes), PovmFamily::mub, "mub" + std::to_string(dim));
}

Povm covariant_qubit_povm(int polar_nodes) {
  if (polar_nodes < 2) throw ValidationError("covariant POVM needs at least 2 polar nodes");
  const auto rule = gauss_legendre(polar_nodes);
  const int azimuths = 2 * polar_nodes;
  const auto& p = pauli_matrices();
  std::vector<CMatrix> outcomes;
  outcomes.reserve(rule.nodes.size() * static_cast<std::size_t>(azimuths));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double ct = rule.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double w = 0.5 * rule.weights[i] / azimuths;
    for (int k = 0; k < azimuths; ++k) {
      const double ph = 2.0 * std::numbers::pi * (k + 0.5) / azimuths;
      const Eigen::Vector3d v(st * std::cos(ph), st * std::sin(ph), ct);
      outcomes.push_back(w * (CMatrix::Identity(2, 2) + v.x() * p[0] + v.y() * p[1] + v.z() * p[2]));
    }
  }
  return Povm(std::move(outcomes), PovmFamily::covariant, "covariant" + std::to_string(polar_nodes));
}

Povm mix_povms(const Povm& a, double p, const Povm& b) {
  if (a.dim() != b.dim()) throw ValidationError("mix_povms: dimension mismatch");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("mix_povms: p outside [0, 1]");
  std::vector<CMatrix> outcomes;
  outcomes.reserve(a.size() + b.size());
  for (const auto& pi : a.outcomes()) outcomes.push_back(p * pi);
  for (const auto& pi : b.outcomes()) outcomes.push_back((1.0 - p) * pi);
  return Povm(std::move(outcomes), PovmFamily::custom, a.label() + "+" + b.label());
}

Povm rotate_povm(const Povm& povm, const CMatrix& unitary) {
  if (unitary.rows() != povm.dim() || unitary.cols() != povm.dim())
    throw ValidationError("rotate_povm: unitary has the wrong dimension");
  std::vector<CMatrix> outcomes;
  outcomes.reserve(povm.size());
  for (const auto& pi : povm.outcomes()) {
    CMatrix r = unitary * pi * unitary.adjoint();
    outcomes.push_back(0.5 * (r + r.adjoint()));
  }
  return Povm(std::move(outcomes), povm.family(), povm.label());
}

Povm builtin_povm(std::string_view name) {
  const std::string_view full = name;
  if (name.starts_with("builtin:")) name.remove_prefix(8);
  for (auto solid : {PlatonicSolid::tetrahedron, PlatonicSolid::octahedron, PlatonicSolid::cube,
                     PlatonicSolid::icosahedron, PlatonicSolid::dodecahedron})
    if (name == to_string(solid)) return platonic_povm(solid);
  if (name.starts_with("sic")) return sic_povm(parse_suffix_int(name.substr(3), full));
  if (name.starts_with("mub")) return mub_povm(parse_suffix_int(name.substr(3), full));
  if (name.starts_with("covariant")) {
    const auto rest = name.substr(9);
    return covariant_qubit_povm(rest.empty() ? 24 : parse_suffix_int(rest, full));
  }
  throw ValidationError("unknown built-in POVM '" + std::string(full) + "'");
}

Superoperator frame_superop(const Povm& povm) {
  const int n = povm.dim() * povm.dim();
  Superoperator f = Superoperator::Zero(n, n);
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const double w = povm.weights()[k];
    if (!(w > 0.0))
      throw ValidationError("POVM outcome " + std::to_string(k) + " has zero trace");
    f.noalias() += (povm.dim() / w) * povm.kets()[k] * povm.kets()[k].transpose();
  }
  return f;
}

Superoperator frame_superop_from(const Povm& povm, const RVector& q, double eps) {
  if (q.size() != static_cast<Eigen::Index>(povm.size()))
    throw ValidationError("frame_superop_from: weight vector has the wrong length");
  const int n = povm.dim() * povm.dim();
  Superoperator f = Superoperator::Zero(n, n);
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const double qk = q(static_cast<Eigen::Index>(k));
    if (!(qk > eps))
      throw BoundaryStateError("boundary state: outcome " + std::to_string(k) +
                                   " has probability " + std::to_string(qk),
                               static_cast<std::ptrdiff_t>(k));
    f.noalias() += povm.kets()[k] * povm.kets()[k].transpose() / qk;
  }
  return f;
}

Superoperator frame_superop_at(const Povm& povm, const CMatrix& rho, double eps) {
  return frame_superop_from(povm, povm.probabilities(rho), eps);
}

bool is_informationally_complete(const Povm& povm) {
  const Superoperator f = frame_superop(povm);
  return symmetric_rank(f, 1e-10) == f.rows();
}

TightIcResult is_tight_ic(const Povm& povm, double tol) {
  TightIcResult result;
  const int d = povm.dim();
  const int n = d * d;
  CMatrix accum = CMatrix::Zero(n, n);
  for (const auto& pi : povm.outcomes()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(pi);
    const RVector& w = es.eigenvalues();
    const double top = w(d - 1);
    if (d > 1 && w.head(d - 1).cwiseAbs().maxCoeff() > tol * std::max(1.0, top)) {
      result.rank_one = false;
      result.residual = std::numeric_limits<double>::infinity();
      return result;
    }
    const CVector psi = es.eigenvectors().col(d - 1);
    const CMatrix proj = psi * psi.adjoint();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) accum.block(a * d, b * d, d, d) += top * proj(a, b) * proj;
  }
  result.rank_one = true;
  // 2 P_sym / (d + 1) with P_sym = (1 + SWAP)/2
  CMatrix target = CMatrix::Identity(n, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) target(i * d + j, j * d + i) += 1.0;
  target /= (d + 1.0);
  result.residual = (accum - target).cwiseAbs().maxCoeff();
  result.tight = result.residual < tol;
  return result;
}

}  // namespace qtomo
