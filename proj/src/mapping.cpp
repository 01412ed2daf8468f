#include "eat/mapping.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>

namespace eat {

using nlohmann::json;

EmotionLabel EmotionLabel::from_name(std::string_view name) {
  if (auto label = try_from_name(name)) return *label;
  throw Error("unknown emotion label '" + std::string(name) + "'");
}

EmotionLabel EmotionLabel::from_index(int index) {
  if (index < 0 || index >= kNumEmotions) {
    throw Error("emotion index out of range: " + std::to_string(index));
  }
  return EmotionLabel(index);
}

std::optional<EmotionLabel> EmotionLabel::try_from_name(std::string_view name) {
  const auto it = std::find(kEmotionTaxonomy.begin(), kEmotionTaxonomy.end(), name);
  if (it == kEmotionTaxonomy.end()) return std::nullopt;
  return EmotionLabel(static_cast<int>(it - kEmotionTaxonomy.begin()));
}

void ConceptMap::set(EmotionLabel emotion, CyberLabel target) {
  groups_[static_cast<std::size_t>(emotion.index())] = cyber_label_from_int(to_int(target));
}

void ConceptMap::erase(EmotionLabel emotion) {
  groups_[static_cast<std::size_t>(emotion.index())].reset();
}

std::optional<CyberLabel> ConceptMap::lookup(EmotionLabel emotion) const {
  return groups_[static_cast<std::size_t>(emotion.index())];
}

std::vector<EmotionLabel> ConceptMap::mapped_emotions() const {
  std::vector<EmotionLabel> out;
  for (int i = 0; i < kNumEmotions; ++i) {
    if (groups_[static_cast<std::size_t>(i)]) out.push_back(EmotionLabel::from_index(i));
  }
  return out;
}

std::size_t ConceptMap::size() const {
  return static_cast<std::size_t>(
      std::count_if(groups_.begin(), groups_.end(), [](const auto& g) { return g.has_value(); }));
}

ConceptMap default_concept_map() {
  ConceptMap map;
  map.set(EmotionLabel::from_name("anger"), CyberLabel::harassment);
  map.set(EmotionLabel::from_name("disgust"), CyberLabel::harassment);
  map.set(EmotionLabel::from_name("surprise"), CyberLabel::defamation);
  map.set(EmotionLabel::from_name("gratitude"), CyberLabel::non_cyberbullying);
  map.set(EmotionLabel::from_name("joy"), CyberLabel::non_cyberbullying);
  return map;
}

void to_json(json& j, const ConceptMap& map) {
  j = json::object();
  for (const auto emotion : map.mapped_emotions()) {
    j[std::string(emotion.name())] = to_int(*map.lookup(emotion));
  }
}

void from_json(const json& j, ConceptMap& map) {
  if (!j.is_object()) throw Error("concept map must be a JSON object {emotion: class}");
  map = ConceptMap{};
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number_integer()) {
      throw Error("concept map entry '" + name + "' must be an integer class");
    }
    map.set(EmotionLabel::from_name(normalize_tag(name)), cyber_label_from_int(value.get<int>()));
  }
}

std::vector<std::size_t> plan_composition(std::span<const std::size_t> supply,
                                          std::size_t budget) {
  const std::size_t buckets = supply.size();
  const std::size_t total = std::accumulate(supply.begin(), supply.end(), std::size_t{0});
  if (budget > total) {
    std::string detail;
    for (std::size_t i = 0; i < buckets; ++i) {
      detail += (i ? ", " : "") + std::to_string(supply[i]);
    }
    throw Error("budget " + std::to_string(budget) + " exceeds supply " + std::to_string(total) +
                " (per bucket: " + detail + ")");
  }
  std::vector<std::size_t> take(buckets, 0);
  if (buckets == 0 || budget == 0) return take;

  const std::size_t quota = budget / buckets;
  std::size_t deficit = 0;
  std::size_t total_spare = 0;
  for (std::size_t i = 0; i < buckets; ++i) {
    take[i] = std::min(supply[i], quota);
    if (supply[i] < quota) {
      deficit += quota - supply[i];
    } else {
      total_spare += supply[i] - quota;
    }
  }
  if (deficit > 0 && total_spare > 0) {
    for (std::size_t i = 0; i < buckets; ++i) {
      if (supply[i] <= quota) continue;
      const std::size_t spare = supply[i] - quota;
      take[i] += static_cast<std::size_t>(
          (static_cast<unsigned __int128>(deficit) * spare) / total_spare);
    }
  }

  std::size_t leftover = budget - std::accumulate(take.begin(), take.end(), std::size_t{0});
  while (leftover > 0) {
    std::size_t best = buckets;
    for (std::size_t i = 0; i < buckets; ++i) {
      if (take[i] >= supply[i]) continue;
      if (best == buckets || supply[i] > supply[best]) best = i;
    }
    const std::size_t give = std::min(leftover, supply[best] - take[best]);
    take[best] += give;
    leftover -= give;
  }
  return take;
}

namespace {

struct MappedPost {
  std::optional<CyberLabel> label;
  std::optional<EmotionLabel> bucket;
  bool conflict = false;
};

MappedPost map_post(const Post& post, const ConceptMap& map) {
  MappedPost out;
  for (const auto& raw : post.raw_labels) {
    auto emotion = EmotionLabel::try_from_name(raw);
    if (!emotion) emotion = EmotionLabel::try_from_name(normalize_tag(raw));
    if (!emotion) {
      throw Error("post '" + post.id + "' has unknown emotion label '" + raw + "'");
    }
    const auto target = map.lookup(*emotion);
    if (!target) continue;
    if (out.label && *out.label != *target) out.conflict = true;
    out.label = target;
    if (!out.bucket || *emotion < *out.bucket) out.bucket = emotion;
  }
  return out;
}

}  // namespace

std::optional<CyberLabel> mapped_class(const Post& post, const ConceptMap& map) {
  const auto mapped = map_post(post, map);
  if (mapped.conflict) return std::nullopt;
  return mapped.label;
}

ConceptMapResult apply_concept_map(std::span<const Post> emotion_posts, const ConceptMap& map,
                                   std::size_t budget, std::uint64_t seed) {
  ConceptMapResult result;
  const auto emotions = map.mapped_emotions();
  result.plan.buckets = emotions;

  std::vector<std::vector<std::size_t>> members(emotions.size());
  ClassCounts class_supply{};
  for (std::size_t i = 0; i < emotion_posts.size(); ++i) {
    const auto mapped = map_post(emotion_posts[i], map);
    if (!mapped.label) {
      ++result.unmapped;
      continue;
    }
    if (mapped.conflict) {
      ++result.conflicts;
      continue;
    }
    const auto slot = static_cast<std::size_t>(
        std::find(emotions.begin(), emotions.end(), *mapped.bucket) - emotions.begin());
    members[slot].push_back(i);
    ++class_supply[static_cast<std::size_t>(to_int(*mapped.label))];
  }

  const std::size_t total_supply = class_supply[0] + class_supply[1] + class_supply[2];
  if (budget > total_supply) {
    throw Error("emotion budget " + std::to_string(budget) + " exceeds mapped supply " +
                std::to_string(total_supply) + " (class 0: " + std::to_string(class_supply[0]) +
                ", class 1: " + std::to_string(class_supply[1]) +
                ", class 2: " + std::to_string(class_supply[2]) + ")");
  }

  for (const auto& list : members) result.plan.supply.push_back(list.size());
  result.plan.take = plan_composition(result.plan.supply, budget);

  std::mt19937_64 rng(seed);
  for (std::size_t b = 0; b < members.size(); ++b) {
    auto& list = members[b];
    std::sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) {
      return emotion_posts[x].id < emotion_posts[y].id;
    });
    std::shuffle(list.begin(), list.end(), rng);
    const auto target = *map.lookup(emotions[b]);
    for (std::size_t i = 0; i < result.plan.take[b]; ++i) {
      result.items.push_back({emotion_posts[list[i]], target});
    }
  }
  std::sort(result.items.begin(), result.items.end(),
            [](const LabeledPost& a, const LabeledPost& b) { return a.post.id < b.post.id; });
  return result;
}

LikelihoodMatrix emotion_likelihood_matrix(
    std::span<const std::pair<CyberLabel, EmotionLabel>> predictions) {
  LikelihoodMatrix matrix;
  Eigen::Matrix<double, 3, 28> counts = Eigen::Matrix<double, 3, 28>::Zero();
  for (const auto& [truth, emotion] : predictions) {
    counts(to_int(truth), emotion.index()) += 1.0;
    ++matrix.row_counts[static_cast<std::size_t>(to_int(truth))];
  }
  for (int c = 0; c < 3; ++c) {
    const auto n = matrix.row_counts[static_cast<std::size_t>(c)];
    matrix.populated[static_cast<std::size_t>(c)] = n > 0;
    if (n > 0) matrix.cells.row(c) = counts.row(c) / static_cast<double>(n);
  }
  return matrix;
}

void write_likelihood_csv(std::ostream& out, const LikelihoodMatrix& matrix) {
  out << "class";
  for (const auto name : kEmotionTaxonomy) out << ',' << name;
  out << '\n';
  for (int c = 0; c < 3; ++c) {
    out << c;
    for (int e = 0; e < kNumEmotions; ++e) {
      out << ',';
      if (matrix.populated[static_cast<std::size_t>(c)]) {
        out << format_double(matrix.cells(c, e));
      } else {
        out << "NA";
      }
    }
    out << '\n';
  }
}

HarassmentEmotionCheck check_harassment_emotions(const LikelihoodMatrix& matrix,
                                                 const ConceptMap& map) {
  HarassmentEmotionCheck check;
  const int row = to_int(CyberLabel::harassment);
  if (!matrix.populated[static_cast<std::size_t>(row)]) {
    check.message = "harassment row is undefined (no harassment items)";
    return check;
  }
  Eigen::Index argmax = 0;
  matrix.cells.row(row).maxCoeff(&argmax);
  check.row_argmax = EmotionLabel::from_index(static_cast<int>(argmax));

  auto mapped = map.mapped_emotions();
  for (const auto emotion : mapped) {
    if (map.lookup(emotion) == CyberLabel::harassment) {
      check.harassment_mass += matrix.cells(row, emotion.index());
    }
  }
  std::stable_sort(mapped.begin(), mapped.end(), [&](EmotionLabel a, EmotionLabel b) {
    return matrix.cells(row, a.index()) > matrix.cells(row, b.index());
  });
  if (mapped.size() >= 2) {
    check.best_pair = {mapped[0], mapped[1]};
    check.best_pair_mass =
        matrix.cells(row, mapped[0].index()) + matrix.cells(row, mapped[1].index());
  } else if (mapped.size() == 1) {
    check.best_pair = {mapped[0], mapped[0]};
    check.best_pair_mass = matrix.cells(row, mapped[0].index());
  }
  check.holds = check.harassment_mass + 1e-12 >= check.best_pair_mass;
  check.message = std::string(check.holds ? "holds" : "does not hold") +
                  ": harassment-mapped mass " + format_double(check.harassment_mass) +
                  ", best mapped pair (" + std::string(check.best_pair.first.name()) + ", " +
                  std::string(check.best_pair.second.name()) + ") " +
                  format_double(check.best_pair_mass) + ", row maximum at " +
                  std::string(check.row_argmax.name());
  return check;
}

}  // namespace eat
