#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ozd/rng.hpp"

namespace ozd {

/// d x l matrix with orthonormal columns p_i = G e_i.
class OrthoDirections {
 public:
  explicit OrthoDirections(Eigen::MatrixXd columns);

  Eigen::Index dim() const { return columns_.rows(); }
  Eigen::Index count() const { return columns_.cols(); }
  const Eigen::MatrixXd& columns() const { return columns_; }
  auto column(Eigen::Index i) const { return columns_.col(i); }

 private:
  Eigen::MatrixXd columns_;
};

enum class GeneratorKind { Qr, Householder, Butterfly };

struct DirectionGenerator {
  GeneratorKind kind = GeneratorKind::Qr;
  int reflectors = 1;  // Householder only

  std::string name() const;
  static DirectionGenerator parse(const std::string& text);
};

/// First l columns of a Haar-distributed orthogonal matrix.  Gaussian matrix,
/// Householder QR, then column j of Q is multiplied by sign(R_jj).
OrthoDirections sample_haar_qr(Eigen::Index d, Eigen::Index l, RngStream& rng);

/// First l columns of G_1 G_2 ... G_m with G_j = I - 2 v_j v_j^T, v_j uniform on
/// the sphere.
OrthoDirections sample_householder(Eigen::Index d, Eigen::Index l, int m, RngStream& rng);

/// Householder product built from caller-supplied unit vectors (v_1 first).
OrthoDirections householder_from_vectors(Eigen::Index l, std::span<const Eigen::VectorXd> vectors);

/// Butterfly matrix for d = 2^n with angles theta_k uniform on [0, 2 pi].
OrthoDirections sample_butterfly(Eigen::Index d, Eigen::Index l, RngStream& rng);

/// Butterfly recursion G^(n) = [[c G^(n-1), s G^(n-1)], [-s G^(n-1), c G^(n-1)]]
/// with angles[k-1] = theta_k.  Dimension is 2^angles.size().
OrthoDirections butterfly_from_angles(Eigen::Index l, std::span<const double> angles);

OrthoDirections sample_directions(const DirectionGenerator& gen, Eigen::Index d, Eigen::Index l,
                                  RngStream& rng);

bool validate_orthonormal(const OrthoDirections& dirs, double tol);

/// max |C^T C - I| entrywise.
double orthonormality_error(const Eigen::MatrixXd& columns);

bool is_power_of_two(Eigen::Index d);

// ---------------------------------------------------------------------------
// Generation-time benchmark.

/// Methods timed by benchmark_generation.  The unstructured ones draw a dense
/// d x d Gaussian matrix or d i.i.d. sphere vectors and are not orthogonal.
enum class GenerationMethod { Qr, Householder, Butterfly, RandomGaussian, RandomSpherical };

GenerationMethod parse_generation_method(const std::string& text);
std::string to_string(GenerationMethod method);

struct GenerationTiming {
  Eigen::Index dim = 0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
};

/// Wall-clock cost of generating one d x d direction matrix (the l = d case),
/// averaged over `repetitions` draws per dimension.
std::vector<GenerationTiming> benchmark_generation(std::span<const Eigen::Index> dims,
                                                   GenerationMethod method, int repetitions,
                                                   std::uint64_t seed = 0);

}  // namespace ozd
