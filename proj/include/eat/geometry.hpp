#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eat/core.hpp"

namespace eat {

template <typename Scalar>
struct PcaResult {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Matrix coordinates;       // n x k, centered data projected on the components
  Vector explained_variance;  // k sample variances (n - 1 denominator), descending
  Matrix components;        // d x k, orthonormal columns
  RowVector mean;           // 1 x d
  Eigen::Index rank = 0;
};

/// Principal component projection of the rows of `embeddings`.
///
/// Components come from the SVD of the centered data. Each component is
/// flipped so that its largest-magnitude loading is positive (the first one on
/// ties), which makes the output a pure function of the input bits.
/// Requires n > k >= 1 and d >= k; throws when the numerical rank is below k.
template <typename Derived>
PcaResult<typename Derived::Scalar> pca_reduce(const Eigen::MatrixBase<Derived>& embeddings,
                                               Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  using Result = PcaResult<Scalar>;
  using Matrix = typename Result::Matrix;

  const Eigen::Index n = embeddings.rows();
  const Eigen::Index d = embeddings.cols();
  if (k < 1 || n <= k || d < k) {
    throw Error("pca_reduce: need n > k >= 1 and d >= k (n=" + std::to_string(n) +
                ", d=" + std::to_string(d) + ", k=" + std::to_string(k) + ")");
  }

  Result result;
  result.mean = embeddings.colwise().mean();
  const Matrix centered = embeddings.rowwise() - result.mean;

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const auto& singular = svd.singularValues();
  const Scalar tolerance = static_cast<Scalar>(std::max(n, d)) *
                           std::numeric_limits<Scalar>::epsilon() *
                           (singular.size() > 0 ? singular(0) : Scalar(0));
  result.rank = (singular.array() > tolerance).count();
  if (result.rank < k) {
    throw Error("pca_reduce: data has rank " + std::to_string(result.rank) +
                ", fewer than the " + std::to_string(k) + " requested components");
  }

  result.components = svd.matrixV().leftCols(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index pivot = 0;
    result.components.col(c).cwiseAbs().maxCoeff(&pivot);
    if (result.components(pivot, c) < Scalar(0)) result.components.col(c) *= Scalar(-1);
  }
  result.explained_variance =
      singular.head(k).array().square() / static_cast<Scalar>(n - 1);
  result.coordinates = centered * result.components;
  return result;
}

/// Fraction of total variance carried by each of the k components.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> explained_variance_ratio(
    const Eigen::MatrixBase<Derived>& embeddings, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  const auto pca = pca_reduce(embeddings, k);
  const auto centered = (embeddings.rowwise() - embeddings.colwise().mean()).eval();
  const Scalar total = centered.squaredNorm() / static_cast<Scalar>(embeddings.rows() - 1);
  return pca.explained_variance / total;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& a,
                                 const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar denom = a.norm() * b.norm();
  if (denom == Scalar(0)) return Scalar(0);
  return std::clamp(a.dot(b) / denom, Scalar(-1), Scalar(1));
}

/// Cosine between the row centroids of two embedding matrices.
double centroid_cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Mean cosine over all cross-domain row pairs.
double mean_pairwise_cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

enum class Domain { emotion, cyberbullying };
std::string_view to_string(Domain domain);

struct ProjectionResult {
  Eigen::MatrixXd coordinates;  // n x k, emotion rows first
  Eigen::VectorXd explained_variance;
  std::vector<Domain> domain_tags;
  double similarity = 0.0;     // centroid cosine in the embedding space
  double similarity_2d = 0.0;  // centroid cosine of the uncentered k-D projection
  std::optional<double> mean_pairwise;
  std::string method = "pca";
};

using Embedder = std::function<Eigen::MatrixXd(std::span<const Post>)>;

struct SimilarityOptions {
  Eigen::Index dims = 2;
  bool mean_pairwise = false;
};

/// Embeds both samples, projects them jointly and scores how close the two
/// domains sit. `similarity` is symmetric in its arguments.
ProjectionResult domain_similarity(std::span<const Post> emotion_sample,
                                   std::span<const Post> cyber_sample, const Embedder& embedder,
                                   const SimilarityOptions& options = {});

/// Optional 2-D neighbourhood embedding (e.g. t-SNE) applied to raw embeddings.
using NeighbourEmbedding = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

/// Rows of the projection export; `cyber_class` is -1 when unknown.
struct ProjectionRow {
  double x = 0.0;
  double y = 0.0;
  Domain domain = Domain::emotion;
  int cyber_class = -1;
  std::string method;
};

/// CSV with header x,y,domain,class,method. Coordinates are written in
/// shortest round-trip form. Throws when labels and rows disagree in length.
void export_projection(std::ostream& out, const ProjectionResult& result,
                       std::span<const int> dataset_labels);

/// Same export with coordinates from a supplied neighbourhood embedding of
/// `embeddings` (method tag "tsne").
void export_projection(std::ostream& out, const Eigen::MatrixXd& embeddings,
                       std::span<const Domain> domains, std::span<const int> dataset_labels,
                       const NeighbourEmbedding& neighbour_embedding);

std::vector<ProjectionRow> read_projection_csv(std::istream& in);

}  // namespace eat
