#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pantry/kb/types.hpp"

namespace pantry::price {

inline constexpr double kDefaultMinSimilarity = 0.60;

struct SubstitutionEdge {
  std::string a;
  std::string b;
  double weight = 0.0;
};

/// Undirected weighted graph over item ids; no self-edges, weights in [0, 1].
class SubstitutionGraph {
 public:
  void add_node(const std::string& id);
  void add_edge(const std::string& a, const std::string& b, double weight);

  bool contains(std::string_view id) const;
  std::optional<double> weight(std::string_view a, std::string_view b) const;
  /// Neighbors of `id` with weights, ordered by id.
  std::vector<std::pair<std::string, double>> neighbors(std::string_view id) const;
  std::vector<std::string> nodes() const;
  std::vector<SubstitutionEdge> edges() const;  // each edge once, a < b
  std::size_t edge_count() const;

 private:
  std::map<std::string, std::map<std::string, double>, std::less<>> adjacency_;
};

/// True when protein carries at least 20% of the item's energy (4 kcal/g).
bool in_protein_class(const kb::FoodItem& item);

/// Cosine similarity of nutrient vectors, each component divided by `scale[n]` (household R_n).
double nutrient_similarity(const kb::FoodItem& a, const kb::FoodItem& b, const std::map<std::string, double>& scale);

/// Edge (a, b) when they share a category or both sit in the protein class, and their scaled
/// nutrient cosine is at least `min_similarity`; the cosine is the weight.
SubstitutionGraph build_substitution_graph(std::span<const kb::FoodItem> items, double min_similarity,
                                           const std::map<std::string, double>& scale);

/// Up to k rule-compatible neighbors of `item_id`, by weight descending, then current price
/// ascending, then id. Throws LookupError for an item outside the graph.
std::vector<std::string> substitution_candidates(const SubstitutionGraph& graph, std::string_view item_id,
                                                 const std::set<std::string>& rules, std::size_t k,
                                                 std::span<const kb::FoodItem> items,
                                                 const std::map<std::string, double>& prices);

}  // namespace pantry::price
