#include "ozd/directions.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ozd/errors.hpp"

namespace ozd {

namespace {

void check_counts(Eigen::Index d, Eigen::Index l) {
  if (d < 1) throw DomainError(fmt::format("dimension must be >= 1, got {}", d));
  if (l < 1 || l > d)
    throw DomainError(fmt::format("direction count must satisfy 1 <= l <= d, got l={} d={}", l, d));
}

}  // namespace

OrthoDirections::OrthoDirections(Eigen::MatrixXd columns) : columns_(std::move(columns)) {
  if (columns_.rows() < 1 || columns_.cols() < 1 || columns_.cols() > columns_.rows())
    throw DomainError("direction matrix must be d x l with 1 <= l <= d");
}

std::string DirectionGenerator::name() const {
  switch (kind) {
    case GeneratorKind::Qr:
      return "qr";
    case GeneratorKind::Householder:
      return reflectors == 1 ? "householder" : fmt::format("householder:{}", reflectors);
    case GeneratorKind::Butterfly:
      return "butterfly";
  }
  return "?";
}

DirectionGenerator DirectionGenerator::parse(const std::string& text) {
  if (text == "qr") return {GeneratorKind::Qr, 1};
  if (text == "butterfly") return {GeneratorKind::Butterfly, 1};
  if (text == "householder") return {GeneratorKind::Householder, 1};
  if (text.rfind("householder:", 0) == 0) {
    const int m = std::stoi(text.substr(12));
    if (m < 1) throw ConfigError("householder reflector count must be >= 1");
    return {GeneratorKind::Householder, m};
  }
  throw ConfigError(fmt::format("unknown direction generator '{}'", text));
}

OrthoDirections sample_haar_qr(Eigen::Index d, Eigen::Index l, RngStream& rng) {
  check_counts(d, l);
  // The first l columns of Q depend only on the first l columns of the
  // Gaussian matrix, so a d x l draw gives the same distribution as truncating
  // the full d x d factor.
  Eigen::MatrixXd gaussian(d, l);
  for (Eigen::Index j = 0; j < l; ++j)
    for (Eigen::Index i = 0; i < d; ++i) gaussian(i, j) = rng.normal();

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, l);
  const auto& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < l; ++j)
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  return OrthoDirections(std::move(q));
}

OrthoDirections householder_from_vectors(Eigen::Index l,
                                         std::span<const Eigen::VectorXd> vectors) {
  if (vectors.empty()) throw DomainError("householder product needs at least one reflector");
  const Eigen::Index d = vectors.front().size();
  check_counts(d, l);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, l);
  // G_1 ... G_m I_{d,l}: apply the rightmost reflector first.
  for (auto it = vectors.rbegin(); it != vectors.rend(); ++it) {
    const Eigen::VectorXd& v = *it;
    if (v.size() != d) throw DomainError("reflector vectors must share one dimension");
    const Eigen::RowVectorXd vt_m = v.transpose() * m;
    m.noalias() -= 2.0 * v * vt_m;
  }
  return OrthoDirections(std::move(m));
}

OrthoDirections sample_householder(Eigen::Index d, Eigen::Index l, int m, RngStream& rng) {
  check_counts(d, l);
  if (m < 1) throw DomainError(fmt::format("reflector count must be >= 1, got {}", m));
  std::vector<Eigen::VectorXd> vectors;
  vectors.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) vectors.push_back(rng.unit_sphere(d));
  return householder_from_vectors(l, vectors);
}

bool is_power_of_two(Eigen::Index d) { return d >= 1 && (d & (d - 1)) == 0; }

OrthoDirections butterfly_from_angles(Eigen::Index l, std::span<const double> angles) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 1);
  for (const double theta : angles) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Eigen::Index n = g.rows();
    Eigen::MatrixXd next(2 * n, 2 * n);
    next.topLeftCorner(n, n) = c * g;
    next.topRightCorner(n, n) = s * g;
    next.bottomLeftCorner(n, n) = -s * g;
    next.bottomRightCorner(n, n) = c * g;
    g = std::move(next);
  }
  check_counts(g.rows(), l);
  return OrthoDirections(g.leftCols(l));
}

OrthoDirections sample_butterfly(Eigen::Index d, Eigen::Index l, RngStream& rng) {
  if (!is_power_of_two(d))
    throw DomainError(fmt::format("butterfly generator requires d = 2^n, got d={}", d));
  check_counts(d, l);
  std::vector<double> angles;
  for (Eigen::Index size = 1; size < d; size *= 2)
    angles.push_back(2.0 * std::numbers::pi * rng.uniform());
  return butterfly_from_angles(l, angles);
}

OrthoDirections sample_directions(const DirectionGenerator& gen, Eigen::Index d, Eigen::Index l,
                                  RngStream& rng) {
  switch (gen.kind) {
    case GeneratorKind::Qr:
      return sample_haar_qr(d, l, rng);
    case GeneratorKind::Householder:
      return sample_householder(d, l, gen.reflectors, rng);
    case GeneratorKind::Butterfly:
      return sample_butterfly(d, l, rng);
  }
  throw DomainError("unknown generator");
}

double orthonormality_error(const Eigen::MatrixXd& columns) {
  const Eigen::MatrixXd gram = columns.transpose() * columns;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

bool validate_orthonormal(const OrthoDirections& dirs, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  return orthonormality_error(dirs.columns()) <= tol;
}

GenerationMethod parse_generation_method(const std::string& text) {
  if (text == "qr") return GenerationMethod::Qr;
  if (text == "householder") return GenerationMethod::Householder;
  if (text == "butterfly") return GenerationMethod::Butterfly;
  if (text == "gaussian") return GenerationMethod::RandomGaussian;
  if (text == "spherical") return GenerationMethod::RandomSpherical;
  throw ConfigError(fmt::format("unknown generation method '{}'", text));
}

std::string to_string(GenerationMethod method) {
  switch (method) {
    case GenerationMethod::Qr:
      return "qr";
    case GenerationMethod::Householder:
      return "householder";
    case GenerationMethod::Butterfly:
      return "butterfly";
    case GenerationMethod::RandomGaussian:
      return "gaussian";
    case GenerationMethod::RandomSpherical:
      return "spherical";
  }
  return "?";
}

std::vector<GenerationTiming> benchmark_generation(std::span<const Eigen::Index> dims,
                                                   GenerationMethod method, int repetitions,
                                                   std::uint64_t seed) {
  if (repetitions < 2) throw DomainError("benchmark needs at least 2 repetitions");
  using clock = std::chrono::steady_clock;
  std::vector<GenerationTiming> table;
  RngStream rng(seed, stream_id_for("benchmark_generation"));
  volatile double sink = 0.0;
  for (const Eigen::Index d : dims) {
    std::vector<double> seconds;
    seconds.reserve(static_cast<std::size_t>(repetitions));
    for (int r = 0; r < repetitions; ++r) {
      const auto start = clock::now();
      switch (method) {
        case GenerationMethod::Qr:
          sink = sink + sample_haar_qr(d, d, rng).columns()(0, 0);
          break;
        case GenerationMethod::Householder:
          sink = sink + sample_householder(d, d, 1, rng).columns()(0, 0);
          break;
        case GenerationMethod::Butterfly:
          sink = sink + sample_butterfly(d, d, rng).columns()(0, 0);
          break;
        case GenerationMethod::RandomGaussian: {
          Eigen::MatrixXd m(d, d);
          for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index i = 0; i < d; ++i) m(i, j) = rng.normal();
          sink = sink + m(0, 0);
          break;
        }
        case GenerationMethod::RandomSpherical: {
          Eigen::MatrixXd m(d, d);
          for (Eigen::Index j = 0; j < d; ++j) m.col(j) = rng.unit_sphere(d);
          sink = sink + m(0, 0);
          break;
        }
      }
      seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
    }
    double mean = 0.0;
    for (const double s : seconds) mean += s;
    mean /= static_cast<double>(seconds.size());
    double var = 0.0;
    for (const double s : seconds) var += (s - mean) * (s - mean);
    var /= static_cast<double>(seconds.size() - 1);
    table.push_back({d, mean, std::sqrt(var)});
  }
  return table;
}

}  // namespace ozd
