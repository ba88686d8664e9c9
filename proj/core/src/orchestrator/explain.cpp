#include "pantry/orchestrator/explain.hpp"

#include <cmath>
#include <cstdio>

namespace pantry::orchestrator {

namespace {

std::string money(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ", ";
    out += p;
  }
  return out;
}

}  // namespace

std::optional<double> ExplanationEntry::value(const std::string& key) const {
  for (const auto& [k, v] : evidence) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<const ExplanationEntry*> Explanation::by_agent(const std::string& agent) const {
  std::vector<const ExplanationEntry*> out;
  for (const auto& e : entries) {
    if (e.agent == agent) out.push_back(&e);
  }
  return out;
}

Explanation explain(const diet::MealPlan* plan, const ExplainInputs& in) {
  Explanation out;

  if (in.budget != nullptr) {
    const auto& b = *in.budget;
    ExplanationEntry e{"budget",
                       "weekly budget " + money(b.amount) + " from share " + std::to_string(b.food_share).substr(0, 5) + " of income " +
                           money(b.monthly_income) + " over 4 weeks" +
                           (b.clamped ? ", limited by disposable income " + money(b.disposable) : ""),
                       {{"weekly_budget", b.amount},
                        {"food_share", b.food_share},
                        {"monthly_income", b.monthly_income},
                        {"fixed_expenses", b.fixed_expenses},
                        {"disposable", b.disposable},
                        {"clamped", b.clamped ? 1.0 : 0.0}}};
    if (plan != nullptr) {
      e.evidence.emplace_back("plan_cost", plan->total_cost);
      e.evidence.emplace_back("headroom", b.amount - plan->total_cost);
    }
    out.entries.push_back(std::move(e));
  }

  if (in.applied_conditions != nullptr && !in.applied_conditions->empty()) {
    out.entries.push_back({"health",
                           "requirements adjusted for " + join(*in.applied_conditions),
                           {{"conditions", static_cast<double>(in.applied_conditions->size())}}});
  }

  if (plan != nullptr && in.requirements != nullptr) {
    auto totals = diet::nutrient_totals(plan->quantities, in.catalog);
    std::vector<std::string> binding;
    ExplanationEntry e{"nutrition", "", {{"adequacy_pct", plan->adequacy.aggregate_pct}}};
    for (const auto& [n, r] : *in.requirements) {
      double slack = totals[n] - r;
      if (std::abs(slack) < kBindingSlack * r) {
        binding.push_back(n);
        e.evidence.emplace_back("slack." + n, slack);
      }
    }
    e.decision = binding.empty() ? "all requirements met with slack" : "binding requirements: " + join(binding);
    out.entries.push_back(std::move(e));
  }

  if (in.diagnosis != nullptr) {
    ExplanationEntry e{"nutrition", "no feasible plan: " + in.diagnosis->summary(), {}};
    if (in.diagnosis->minimum_budget) e.evidence.emplace_back("minimum_budget", *in.diagnosis->minimum_budget);
    out.entries.push_back(std::move(e));
  }

  if (in.trace != nullptr && !in.trace->shocks.empty()) {
    ExplanationEntry e{"price-monitor", "", {}};
    std::vector<std::string> items;
    for (const auto& s : in.trace->shocks) {
      items.push_back(s.event.item_id);
      e.evidence.emplace_back("rel_change." + s.event.item_id, s.event.rel_change);
    }
    e.decision = std::to_string(items.size()) + " price shock(s) above threshold: " + join(items);
    e.evidence.emplace_back("old_cost_revalued", in.trace->old_cost_revalued);
    e.evidence.emplace_back("new_cost", in.trace->new_cost);
    out.entries.push_back(std::move(e));
  }

  if (plan != nullptr) {
    for (const auto& sub : plan->substitutions) {
      ExplanationEntry e{"substitution", sub.removed + " -> " + sub.added + ": " + sub.reason, {}};
      if (in.trace != nullptr) {
        auto removed = in.trace->quantity_delta.find(sub.removed);
        auto added = in.trace->quantity_delta.find(sub.added);
        if (removed != in.trace->quantity_delta.end()) e.evidence.emplace_back("delta." + sub.removed, removed->second);
        if (added != in.trace->quantity_delta.end()) e.evidence.emplace_back("delta." + sub.added, added->second);
        e.evidence.emplace_back("cost_delta", in.trace->new_cost - in.trace->old_cost_revalued);
      }
      out.entries.push_back(std::move(e));
    }
  }

  if (in.shopping != nullptr) {
    const auto& list = *in.shopping;
    ExplanationEntry e{"procurement",
                       std::to_string(list.lines.size()) + " shopping lines, rounding adds " + money(list.overshoot()),
                       {{"list_total", list.total}, {"planned_cost", list.planned_cost}, {"overshoot", list.overshoot()}}};
    if (in.budget != nullptr) {
      e.evidence.emplace_back("over_budget", std::max(0.0, list.total - in.budget->amount));
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

nlohmann::json explanation_to_json(const Explanation& explanation) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : explanation.entries) {
    nlohmann::json evidence = nlohmann::json::object();
    for (const auto& [k, v] : e.evidence) evidence[k] = v;
    entries.push_back({{"agent", e.agent}, {"decision", e.decision}, {"evidence", evidence}});
  }
  return {{"entries", entries}};
}

}  // namespace pantry::orchestrator
