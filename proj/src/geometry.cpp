#include "eat/geometry.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "csv.hpp"

namespace eat {

std::string_view to_string(Domain domain) {
  return domain == Domain::emotion ? "emotion" : "cyberbullying";
}

double centroid_cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0 || b.rows() == 0) throw Error("centroid_cosine: empty sample");
  if (a.cols() != b.cols()) throw Error("centroid_cosine: embedding widths differ");
  const Eigen::RowVectorXd ca = a.colwise().mean();
  const Eigen::RowVectorXd cb = b.colwise().mean();
  return cosine(ca, cb);
}

double mean_pairwise_cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0 || b.rows() == 0) throw Error("mean_pairwise_cosine: empty sample");
  if (a.cols() != b.cols()) throw Error("mean_pairwise_cosine: embedding widths differ");
  auto normalized = [](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out = m;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double norm = out.row(i).norm();
      if (norm > 0) out.row(i) /= norm;
    }
    return out;
  };
  const Eigen::MatrixXd na = normalized(a);
  const Eigen::MatrixXd nb = normalized(b);
  return (na * nb.transpose()).mean();
}

ProjectionResult domain_similarity(std::span<const Post> emotion_sample,
                                   std::span<const Post> cyber_sample, const Embedder& embedder,
                                   const SimilarityOptions& options) {
  if (emotion_sample.empty() || cyber_sample.empty()) {
    throw Error("domain_similarity: both samples must be non-empty");
  }
  const Eigen::MatrixXd emotion = embedder(emotion_sample);
  const Eigen::MatrixXd cyber = embedder(cyber_sample);
  if (emotion.rows() != static_cast<Eigen::Index>(emotion_sample.size()) ||
      cyber.rows() != static_cast<Eigen::Index>(cyber_sample.size())) {
    throw Error("domain_similarity: embedder returned the wrong number of rows");
  }
  if (emotion.cols() != cyber.cols()) {
    throw Error("domain_similarity: embedding widths differ between domains");
  }

  Eigen::MatrixXd joint(emotion.rows() + cyber.rows(), emotion.cols());
  joint << emotion, cyber;
  const auto pca = pca_reduce(joint, options.dims);

  ProjectionResult result;
  result.coordinates = pca.coordinates;
  result.explained_variance = pca.explained_variance;
  result.domain_tags.assign(static_cast<std::size_t>(emotion.rows()), Domain::emotion);
  result.domain_tags.insert(result.domain_tags.end(), static_cast<std::size_t>(cyber.rows()),
                            Domain::cyberbullying);
  result.similarity = centroid_cosine(emotion, cyber);
  const Eigen::RowVectorXd projected_emotion = emotion.colwise().mean() * pca.components;
  const Eigen::RowVectorXd projected_cyber = cyber.colwise().mean() * pca.components;
  result.similarity_2d = cosine(projected_emotion, projected_cyber);
  if (options.mean_pairwise) result.mean_pairwise = mean_pairwise_cosine(emotion, cyber);
  return result;
}

namespace {

void write_rows(std::ostream& out, const Eigen::MatrixXd& coordinates,
                std::span<const Domain> domains, std::span<const int> labels,
                std::string_view method) {
  const auto n = static_cast<std::size_t>(coordinates.rows());
  if (domains.size() != n || labels.size() != n) {
    throw Error("export_projection: " + std::to_string(n) + " coordinate rows, " +
                std::to_string(domains.size()) + " domain tags, " +
                std::to_string(labels.size()) + " labels");
  }
  out << "x,y,domain,class,method\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double y = coordinates.cols() > 1 ? coordinates(r, 1) : 0.0;
    out << format_double(coordinates(r, 0)) << ',' << format_double(y) << ','
        << to_string(domains[i]) << ',';
    if (labels[i] >= 0) out << labels[i];
    out << ',' << method << '\n';
  }
}

double parse_double(const std::string& field, std::size_t line) {
  double value = 0.0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc{} || result.ptr != field.data() + field.size()) {
    throw Error("projection line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return value;
}

}  // namespace

void export_projection(std::ostream& out, const ProjectionResult& result,
                       std::span<const int> dataset_labels) {
  write_rows(out, result.coordinates, result.domain_tags, dataset_labels, result.method);
}

void export_projection(std::ostream& out, const Eigen::MatrixXd& embeddings,
                       std::span<const Domain> domains, std::span<const int> dataset_labels,
                       const NeighbourEmbedding& neighbour_embedding) {
  if (!neighbour_embedding) throw Error("export_projection: no neighbourhood embedding supplied");
  const Eigen::MatrixXd coordinates =
      embeddings.rows() > 0 ? neighbour_embedding(embeddings) : Eigen::MatrixXd(0, 2);
  if (coordinates.rows() != embeddings.rows()) {
    throw Error("export_projection: neighbourhood embedding changed the row count");
  }
  write_rows(out, coordinates, domains, dataset_labels, "tsne");
}

std::vector<ProjectionRow> read_projection_csv(std::istream& in) {
  std::vector<ProjectionRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != 5) {
      throw Error("projection line " + std::to_string(line_no) + ": expected 5 fields");
    }
    ProjectionRow row;
    row.x = parse_double(fields[0], line_no);
    row.y = parse_double(fields[1], line_no);
    if (fields[2] == "emotion") {
      row.domain = Domain::emotion;
    } else if (fields[2] == "cyberbullying") {
      row.domain = Domain::cyberbullying;
    } else {
      throw Error("projection line " + std::to_string(line_no) + ": unknown domain");
    }
    row.cyber_class = fields[3].empty() ? -1 : std::stoi(fields[3]);
    row.method = fields[4];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace eat
