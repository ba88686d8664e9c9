#include "pantry/sim/households.hpp"

#include <cmath>
#include <cstdio>

#include "pantry/error.hpp"
#include "pantry/kb/knowledge_base.hpp"
#include "pantry/sim/rng.hpp"

namespace pantry::sim {

namespace {

constexpr std::uint64_t kHouseholdPurpose = 1;

kb::ActivityLevel draw_activity(Rng& rng, bool child) {
  double u = rng.uniform();
  if (child) return u < 0.5 ? kb::ActivityLevel::moderate : kb::ActivityLevel::active;
  if (u < 0.4) return kb::ActivityLevel::sedentary;
  return u < 0.8 ? kb::ActivityLevel::moderate : kb::ActivityLevel::active;
}

void draw_conditions(Rng& rng, kb::HouseholdMember& m, const HouseholdSampling& s) {
  if (rng.bernoulli(s.vitamin_d_deficiency)) m.conditions.insert("vitamin-d-deficiency");
  bool fertile_woman = m.sex == kb::Sex::female && m.age >= 12 && m.age <= 50;
  if (rng.bernoulli(fertile_woman ? s.anemia_women : s.anemia_other)) m.conditions.insert("anemia");
  bool older = m.age >= 40;
  if (rng.bernoulli(older ? s.hypertension : 0.0)) m.conditions.insert("hypertension");
  if (rng.bernoulli(older ? s.diabetes : 0.0)) m.conditions.insert("diabetes");
}

}  // namespace

std::vector<kb::HouseholdProfile> generate_households(std::size_t n, std::uint64_t seed,
                                                      std::span<const kb::FoodItem> catalog,
                                                      const HouseholdSampling& s, const BasketCheck& check) {
  if (n == 0) throw ContractViolation("generate_households needs n >= 1");
  std::vector<kb::HouseholdProfile> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, i, 0, kHouseholdPurpose);
    kb::HouseholdProfile p;
    char id[32];
    std::snprintf(id, sizeof id, "sim-%04zu", i + 1);
    p.id = id;

    p.monthly_income = std::round(rng.uniform(s.income_min, s.income_max) / 10.0) * 10.0;
    p.fixed_expenses = std::round(p.monthly_income * rng.uniform(s.fixed_share_min, s.fixed_share_max) / 10.0) * 10.0;
    p.food_share = std::round(rng.uniform(s.food_share_min, s.food_share_max) * 1000.0) / 1000.0;

    const int size = rng.uniform_int(s.size_min, s.size_max);
    for (int k = 0; k < size; ++k) {
      kb::HouseholdMember m;
      if (k < 2) {
        m.age = rng.uniform_int(25, 55);
        m.sex = k == 0 ? kb::Sex::male : kb::Sex::female;
        m.activity_level = draw_activity(rng, false);
      } else if (rng.bernoulli(s.grandparent_probability)) {
        m.age = rng.uniform_int(60, 80);
        m.sex = rng.bernoulli(0.5) ? kb::Sex::male : kb::Sex::female;
        m.activity_level = draw_activity(rng, false);
      } else {
        m.age = rng.uniform_int(1, 17);
        m.sex = rng.bernoulli(0.5) ? kb::Sex::male : kb::Sex::female;
        m.activity_level = draw_activity(rng, true);
      }
      draw_conditions(rng, m, s);
      p.members.push_back(std::move(m));
    }

    for (const auto& [rule, prob] : s.rule_probability) {
      if (rng.bernoulli(prob)) p.dietary_rules.insert(rule);
    }

    if (!catalog.empty()) {
      const auto compatible = kb::compatible_items(catalog, p.dietary_rules);
      for (int attempt = 0; attempt < kBasketAttempts; ++attempt) {
        p.preferred_items.clear();
        for (const auto& item : compatible) {
          if (rng.bernoulli(s.basket_share)) p.preferred_items.push_back(item.id);
        }
        if (!check || check(p)) break;
        if (attempt + 1 == kBasketAttempts) p.preferred_items.clear();
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace pantry::sim
