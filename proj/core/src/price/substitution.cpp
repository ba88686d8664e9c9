#include "pantry/price/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pantry/error.hpp"
#include "pantry/kb/knowledge_base.hpp"

namespace pantry::price {

void SubstitutionGraph::add_node(const std::string& id) { adjacency_[id]; }

void SubstitutionGraph::add_edge(const std::string& a, const std::string& b, double weight) {
  if (a == b) throw ContractViolation("self-edge on '" + a + "'");
  if (!(weight >= 0.0 && weight <= 1.0)) throw ContractViolation("edge weight must be in [0, 1]");
  adjacency_[a][b] = weight;
  adjacency_[b][a] = weight;
}

bool SubstitutionGraph::contains(std::string_view id) const { return adjacency_.find(id) != adjacency_.end(); }

std::optional<double> SubstitutionGraph::weight(std::string_view a, std::string_view b) const {
  auto node = adjacency_.find(a);
  if (node == adjacency_.end()) return std::nullopt;
  auto edge = node->second.find(std::string(b));
  if (edge == node->second.end()) return std::nullopt;
  return edge->second;
}

std::vector<std::pair<std::string, double>> SubstitutionGraph::neighbors(std::string_view id) const {
  auto node = adjacency_.find(id);
  if (node == adjacency_.end()) return {};
  return {node->second.begin(), node->second.end()};
}

std::vector<std::string> SubstitutionGraph::nodes() const {
  std::vector<std::string> out;
  for (const auto& [id, edges] : adjacency_) out.push_back(id);
  return out;
}

std::vector<SubstitutionEdge> SubstitutionGraph::edges() const {
  std::vector<SubstitutionEdge> out;
  for (const auto& [a, edges] : adjacency_) {
    for (const auto& [b, w] : edges) {
      if (a < b) out.push_back({a, b, w});
    }
  }
  return out;
}

std::size_t SubstitutionGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& [id, edges] : adjacency_) twice += edges.size();
  return twice / 2;
}

bool in_protein_class(const kb::FoodItem& item) {
  const double energy = item.nutrient("energy");
  if (!(energy > 0.0)) return false;
  return 4.0 * item.nutrient("protein") >= 0.20 * energy;
}

double nutrient_similarity(const kb::FoodItem& a, const kb::FoodItem& b, const std::map<std::string, double>& scale) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [id, divisor] : scale) {
    if (!(divisor > 0.0)) continue;
    const double va = a.nutrient(id) / divisor;
    const double vb = b.nutrient(id) / divisor;
    dot += va * vb;
    na += va * va;
    nb += vb * vb;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): identical vectors give exactly 1
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

SubstitutionGraph build_substitution_graph(std::span<const kb::FoodItem> items, double min_similarity,
                                           const std::map<std::string, double>& scale) {
  SubstitutionGraph graph;
  std::vector<bool> protein(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    graph.add_node(items[i].id);
    protein[i] = in_protein_class(items[i]);
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      bool related = items[i].category == items[j].category || (protein[i] && protein[j]);
      if (!related || items[i].id == items[j].id) continue;
      double sim = nutrient_similarity(items[i], items[j], scale);
      if (sim >= min_similarity) graph.add_edge(items[i].id, items[j].id, sim);
    }
  }
  return graph;
}

std::vector<std::string> substitution_candidates(const SubstitutionGraph& graph, std::string_view item_id,
                                                 const std::set<std::string>& rules, std::size_t k,
                                                 std::span<const kb::FoodItem> items,
                                                 const std::map<std::string, double>& prices) {
  if (!graph.contains(item_id)) throw LookupError("item '" + std::string(item_id) + "' not in substitution graph");
  if (k == 0) return {};
  std::set<std::string> allowed;
  for (const auto& item : kb::compatible_items(items, rules)) allowed.insert(item.id);

  struct Ranked {
    std::string id;
    double weight;
    double price;
  };
  std::vector<Ranked> ranked;
  for (const auto& [id, weight] : graph.neighbors(item_id)) {
    if (!allowed.contains(id)) continue;
    auto p = prices.find(id);
    ranked.push_back({id, weight, p == prices.end() ? std::numeric_limits<double>::infinity() : p->second});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.price != b.price) return a.price < b.price;
    return a.id < b.id;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].id);
  return out;
}

}  // namespace pantry::price
