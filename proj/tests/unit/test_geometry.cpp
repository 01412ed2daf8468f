#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include <Eigen/Eigenvalues>

#include "eat/backend.hpp"
#include "eat/geometry.hpp"
#include "support.hpp"

using namespace eat;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = normal(rng);
  }
  return m;
}

// Cluster of n rows around `centre` with small isotropic noise.
Eigen::MatrixXd cluster(const Eigen::RowVectorXd& centre, Eigen::Index n, std::uint64_t seed) {
  Eigen::MatrixXd m = 0.01 * gaussian(n, centre.size(), seed);
  m.rowwise() += centre;
  return m;
}

std::vector<Post> numbered_posts(const std::string& prefix, int n) {
  std::vector<Post> posts;
  for (int i = 0; i < n; ++i) {
    posts.push_back(testing::post(prefix + std::to_string(i), prefix + " " + std::to_string(i)));
  }
  return posts;
}

}  // namespace

TEST_CASE("PCA agrees with the covariance eigendecomposition") {
  const Eigen::MatrixXd x = gaussian(50, 10, 50);
  const auto pca = pca_reduce(x, 2);

  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 49.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigenvalues come back ascending.
  for (int c = 0; c < 2; ++c) {
    const Eigen::Index idx = 9 - c;
    CHECK(pca.explained_variance(c) == doctest::Approx(solver.eigenvalues()(idx)).epsilon(1e-9));
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    // The oracle's sign is arbitrary; match on absolute alignment.
    CHECK(std::abs(v.dot(pca.components.col(c))) == doctest::Approx(1.0).epsilon(1e-9));
    const Eigen::VectorXd projected = centered * v;
    CHECK((projected.cwiseAbs() - pca.coordinates.col(c).cwiseAbs()).cwiseAbs().maxCoeff() <
          1e-9);
  }
  CHECK(pca.components.cols() == 2);
  CHECK((pca.components.transpose() * pca.components - Eigen::Matrix2d::Identity()).norm() <
        1e-12);
}

TEST_CASE("points on a line carry all variance on one component") {
  Eigen::MatrixXd x(20, 3);
  for (int i = 0; i < 20; ++i) x.row(i) << i, 2.0 * i, -1.0 * i;
  const auto ratio = explained_variance_ratio(x, 1);
  CHECK(ratio(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(pca_reduce(x, 2), Error);
}

TEST_CASE("full-rank projection reconstructs the data") {
  const Eigen::MatrixXd x = gaussian(30, 4, 4);
  const auto pca = pca_reduce(x, 4);
  const Eigen::MatrixXd rebuilt =
      (pca.coordinates * pca.components.transpose()).rowwise() + pca.mean;
  CHECK((rebuilt - x).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(explained_variance_ratio(x, 4).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("PCA argument checks and sign determinism") {
  const Eigen::MatrixXd x = gaussian(10, 3, 9);
  CHECK_THROWS_AS(pca_reduce(x, 0), Error);
  CHECK_THROWS_AS(pca_reduce(x, 4), Error);
  CHECK_THROWS_AS(pca_reduce(x.topRows(2), 2), Error);

  const auto a = pca_reduce(x, 2);
  const auto b = pca_reduce(x, 2);
  CHECK(a.coordinates == b.coordinates);
  for (int c = 0; c < 2; ++c) {
    Eigen::Index pivot = 0;
    a.components.col(c).cwiseAbs().maxCoeff(&pivot);
    CHECK(a.components(pivot, c) > 0);
  }
  const auto single = pca_reduce(Eigen::MatrixXf(x.cast<float>()), 2);
  CHECK(single.explained_variance(0) == doctest::Approx(a.explained_variance(0)).epsilon(1e-4));
}

TEST_CASE("explained variance is invariant under rotation") {
  const Eigen::MatrixXd x = gaussian(40, 5, 17);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(5, 5, 18)).householderQ();
  const auto before = pca_reduce(x, 3);
  const auto after = pca_reduce(Eigen::MatrixXd(x * q), 3);
  for (int c = 0; c < 3; ++c) {
    CHECK(after.explained_variance(c) == doctest::Approx(before.explained_variance(c)).epsilon(1e-9));
  }
}

TEST_CASE("cosine helpers") {
  const Eigen::RowVector3d a(1, 0, 0);
  const Eigen::RowVector3d b(0, 2, 0);
  CHECK(cosine(a, a) == doctest::Approx(1.0));
  CHECK(cosine(a, b) == doctest::Approx(0.0));
  CHECK(cosine(a, Eigen::RowVector3d::Zero()) == 0.0);

  const Eigen::MatrixXd x = cluster(Eigen::RowVectorXd::Unit(8, 0), 30, 1);
  const Eigen::MatrixXd y = cluster(Eigen::RowVectorXd::Unit(8, 1), 30, 2);
  CHECK(centroid_cosine(x, x) >= 0.999);
  CHECK(std::abs(centroid_cosine(x, y)) < 0.05);
  CHECK(centroid_cosine(x, y) == centroid_cosine(y, x));
  CHECK(mean_pairwise_cosine(x, y) == doctest::Approx(mean_pairwise_cosine(y, x)).epsilon(1e-12));
}

TEST_CASE("domain similarity of identical and orthogonal domains") {
  const auto emotion = numbered_posts("e", 40);
  const auto cyber = numbered_posts("c", 40);
  // Emotion posts sit near axis 0, cyberbullying posts near axis 1.
  const Embedder orthogonal = [](std::span<const Post> posts) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(posts.size()), 6);
    for (std::size_t i = 0; i < posts.size(); ++i) {
      const auto axis = posts[i].id[0] == 'e' ? 0 : 1;
      out.row(static_cast<Eigen::Index>(i)) =
          cluster(Eigen::RowVectorXd::Unit(6, axis), 1, i + 1).row(0);
    }
    return out;
  };
  const auto apart = domain_similarity(emotion, cyber, orthogonal);
  CHECK(apart.similarity == doctest::Approx(0.0).epsilon(0.05));
  CHECK(std::abs(apart.similarity) < 0.05);
  CHECK(apart.coordinates.rows() == 80);
  CHECK(apart.domain_tags.front() == Domain::emotion);
  CHECK(apart.domain_tags.back() == Domain::cyberbullying);

  const auto reversed = domain_similarity(cyber, emotion, orthogonal);
  CHECK(reversed.similarity == doctest::Approx(apart.similarity).epsilon(1e-12));

  const Embedder reference = [](std::span<const Post> posts) { return embed("reference", posts); };
  const auto same = domain_similarity(emotion, emotion, reference, {2, true});
  CHECK(same.similarity >= 0.999);
  REQUIRE(same.mean_pairwise);
  CHECK(*same.mean_pairwise > 0);
}

TEST_CASE("projection export") {
  std::vector<Post> emotion;
  std::vector<Post> cyber;
  for (int i = 0; i < 1000; ++i) {
    emotion.push_back(testing::post("e" + std::to_string(i), "joy happy " + std::to_string(i % 50)));
    cyber.push_back(testing::post("c" + std::to_string(i), "idiot rumor " + std::to_string(i % 60)));
  }
  const Embedder reference = [](std::span<const Post> posts) { return embed("reference", posts); };
  const auto result = domain_similarity(emotion, cyber, reference);
  std::vector<int> classes(2000, -1);
  for (int i = 1000; i < 2000; ++i) classes[static_cast<std::size_t>(i)] = i % 3;

  std::ostringstream out;
  export_projection(out, result, classes);
  const std::string csv = out.str();
  CHECK(csv.rfind("x,y,domain,class,method\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2001);

  std::istringstream in(csv);
  const auto rows = read_projection_csv(in);
  REQUIRE(rows.size() == 2000);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].x == result.coordinates(static_cast<Eigen::Index>(i), 0));
    CHECK(rows[i].y == result.coordinates(static_cast<Eigen::Index>(i), 1));
    CHECK(rows[i].cyber_class == classes[i]);
    CHECK(rows[i].method == "pca");
  }
  CHECK(rows.front().domain == Domain::emotion);
  CHECK(rows.back().domain == Domain::cyberbullying);

  std::ostringstream again;
  export_projection(again, domain_similarity(emotion, cyber, reference), classes);
  CHECK(again.str() == csv);

  std::vector<int> short_labels(10, 0);
  std::ostringstream bad;
  CHECK_THROWS_AS(export_projection(bad, result, short_labels), Error);
}

TEST_CASE("empty projection writes only the header") {
  ProjectionResult empty;
  empty.coordinates.resize(0, 2);
  std::ostringstream out;
  export_projection(out, empty, std::span<const int>{});
  CHECK(out.str() == "x,y,domain,class,method\n");
}

TEST_CASE("neighbour-embedding export is tagged and uses the supplied coordinates") {
  const Eigen::MatrixXd raw = gaussian(6, 4, 3);
  const std::vector<Domain> domains{Domain::emotion, Domain::emotion, Domain::emotion,
                                    Domain::cyberbullying, Domain::cyberbullying,
                                    Domain::cyberbullying};
  const std::vector<int> classes{-1, -1, -1, 0, 1, 2};
  const NeighbourEmbedding first_two = [](const Eigen::MatrixXd& m) {
    return Eigen::MatrixXd(m.leftCols(2));
  };
  std::ostringstream out;
  export_projection(out, raw, domains, classes, first_two);
  std::istringstream in(out.str());
  const auto rows = read_projection_csv(in);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(rows[i].method == "tsne");
    CHECK(rows[i].x == raw(static_cast<Eigen::Index>(i), 0));
    CHECK(rows[i].domain == domains[i]);
  }
}
