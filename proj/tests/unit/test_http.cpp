#include <doctest.h>

#include <atomic>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "fixtures.hpp"
#include "pantry/kb/io.hpp"
#include "pantry/kb/knowledge_base.hpp"
#include "pantry/orchestrator/http_service.hpp"
#include "pantry/orchestrator/orchestrator.hpp"

using namespace pantry;
using nlohmann::json;

namespace {

// A service on an ephemeral port with the bundled catalog and prices loaded.
struct Server {
  kb::KnowledgeBase store;
  orchestrator::Orchestrator orch;
  orchestrator::HttpService service;
  std::thread thread;
  int port = -1;

  explicit Server(orchestrator::ServiceOptions options = {})
      : orch(store, testing::reference_table(), testing::reference_rules()),
        service(orch, store, std::move(options)) {
    store.set_foods(testing::reference_foods());
    store.ingest_prices(kb::load_prices_file(testing::data_file("prices.jsonl").string()));
    port = service.bind(0);
    REQUIRE(port > 0);
    thread = std::thread([this] { service.serve(); });
    for (int i = 0; i < 200 && !service.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }

  ~Server() {
    service.stop();
    thread.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }
};

json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

std::string case_study_body() { return kb::household_to_json(testing::case_study_household()).dump(); }

}  // namespace

TEST_CASE("health check") {
  Server s;
  auto r = s.client().Get("/healthz");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(body_of(r).at("status") == "ok");
}

TEST_CASE("create, read and update a household") {
  Server s;
  auto c = s.client();
  auto created = c.Post("/households", case_study_body(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  auto doc = body_of(created);
  CHECK(doc.at("id") == "case-study");
  CHECK(doc.at("weekly_budget").at("amount").get<double>() == doctest::Approx(415.0));

  auto updated = c.Post("/households", case_study_body(), "application/json");
  REQUIRE(updated);
  CHECK(updated->status == 200);

  auto fetched = c.Get("/households/case-study");
  REQUIRE(fetched);
  CHECK(fetched->status == 200);
  CHECK(kb::household_from_json(body_of(fetched).at("household")) == testing::case_study_household());

  // no id: one is assigned
  auto anon = kb::household_to_json(testing::case_study_household());
  anon.erase("id");
  auto assigned = c.Post("/households", anon.dump(), "application/json");
  REQUIRE(assigned);
  CHECK(assigned->status == 201);
  CHECK(body_of(assigned).at("id") != "case-study");

  CHECK(c.Get("/households/nobody")->status == 404);
}

TEST_CASE("household validation and budget errors") {
  Server s;
  auto c = s.client();
  auto broke = kb::household_to_json(testing::case_study_household());
  broke["fixed_expenses"] = broke["monthly_income"];
  auto r = c.Post("/households", broke.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 422);
  CHECK(body_of(r).at("error") == "budget");
  CHECK(body_of(r).at("field") == "fixed_expenses");

  auto bad = kb::household_to_json(testing::case_study_household());
  bad["members"][0]["age"] = -3;
  r = c.Post("/households", bad.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);
  CHECK(body_of(r).at("field") == "members[0].age");

  r = c.Post("/households", "{not json", "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);
  CHECK(s.store.household_ids().empty());
}

TEST_CASE("plan, prices, what-if and history") {
  Server s;
  auto c = s.client();
  REQUIRE(c.Post("/households", case_study_body(), "application/json")->status == 201);

  auto planned = c.Post("/households/case-study/plan", "", "application/json");
  REQUIRE(planned);
  REQUIRE(planned->status == 200);
  auto doc = body_of(planned);
  const auto plan = kb::plan_from_json(doc.at("plan"));
  CHECK(plan.total_cost <= 415.0 * (1.0 + 1e-6));
  CHECK_FALSE(doc.at("shopping_list").at("lines").empty());
  CHECK_FALSE(doc.at("explanation").at("entries").empty());
  CHECK_FALSE(doc.at("events").empty());
  CHECK(doc.at("weekly_budget").at("amount").get<double>() == doctest::Approx(415.0));

  auto history = body_of(c.Get("/households/case-study/history")).at("records");
  REQUIRE(history.size() == 1);

  // what-if: reported, never stored
  std::string item;
  double spend = -1.0;
  for (const auto& [id, q] : plan.quantities) {
    if (q * plan.prices_used.at(id) > spend) {
      spend = q * plan.prices_used.at(id);
      item = id;
    }
  }
  auto whatif = c.Post("/households/case-study/whatif", json{{"item_id", item}, {"rel_change", 0.5}}.dump(),
                       "application/json");
  REQUIRE(whatif);
  CHECK(whatif->status == 200);
  auto w = body_of(whatif);
  CHECK(w.at("persisted") == false);
  CHECK(w.at("baseline_cost").get<double>() == doctest::Approx(plan.total_cost));
  CHECK(body_of(c.Get("/households/case-study/history")).at("records").size() == 1);

  CHECK(c.Post("/households/case-study/whatif", json{{"item_id", item}}.dump(), "application/json")->status == 400);
  CHECK(c.Post("/households/case-study/whatif", json{{"item_id", "caviar"}, {"rel_change", 0.1}}.dump(),
               "application/json")
            ->status == 404);
  CHECK(c.Post("/households/nobody/whatif", json{{"item_id", item}, {"rel_change", 0.1}}.dump(), "application/json")
            ->status == 404);

  // a price shock on the biggest line re-plans the household
  const auto ts = *s.store.latest_timestamp() + 86400;
  json quote{{"item_id", item}, {"vendor", "test"}, {"price", plan.prices_used.at(item) * 1.3}, {"timestamp", ts}};
  auto prices = c.Post("/prices", kb::to_jsonl_line(kb::parse_price_batch(quote.dump() + "\n")[0]), "application/x-ndjson");
  REQUIRE(prices);
  CHECK(prices->status == 200);
  auto report = body_of(prices);
  CHECK(report.at("replanned") == json::array({"case-study"}));
  // the same batch again stores nothing and re-plans nobody
  auto again = body_of(c.Post("/prices", json::array({quote}).dump(), "application/json"));
  CHECK(again.at("stored") == 0);
  CHECK(again.at("replanned").empty());

  history = body_of(c.Get("/households/case-study/history")).at("records");
  REQUIRE(history.size() == 2);
  CHECK(history[1].at("trigger") == "shock-replan");

  CHECK(c.Post("/prices", "{\"item_id\": 3}", "application/json")->status == 400);
  CHECK(c.Get("/households/nobody/history")->status == 404);
}

TEST_CASE("plan error paths") {
  Server s;
  auto c = s.client();
  CHECK(c.Post("/households/nobody/plan", "", "application/json")->status == 404);
  REQUIRE(c.Post("/households", case_study_body(), "application/json")->status == 201);
  auto missing = c.Post("/households/case-study/plan?as_of=5", "", "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 409);
  CHECK_FALSE(body_of(missing).at("items").empty());
  CHECK(c.Post("/households/case-study/plan?as_of=soon", "", "application/json")->status == 400);

  // a household whose whole budget is 10 per week
  auto poor = kb::household_to_json(testing::case_study_household());
  poor["fixed_expenses"] = 9960;
  REQUIRE(c.Post("/households", poor.dump(), "application/json")->status == 200);
  auto infeasible = c.Post("/households/case-study/plan", "", "application/json");
  REQUIRE(infeasible);
  CHECK(infeasible->status == 422);
  auto doc = body_of(infeasible);
  CHECK(doc.at("diagnosis").at("kind") == "budget-bound");
  CHECK(doc.at("diagnosis").contains("minimum_budget"));
  CHECK(doc.contains("explanation"));
  CHECK(body_of(c.Get("/households/case-study/history")).at("records").empty());
  CHECK(c.Post("/households/case-study/whatif", json{{"item_id", "rice_white"}, {"rel_change", 0.1}}.dump(),
               "application/json")
            ->status == 404);
}

TEST_CASE("plot data is served from the configured file") {
  testing::TempDir dir("http");
  const auto path = dir.path() / "plot.json";
  std::ofstream(path) << R"({"schema":1,"series":[]})";
  orchestrator::ServiceOptions options;
  options.plot_data = path;
  Server s(options);
  auto r = s.client().Get("/plot-data");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(body_of(r).at("schema") == 1);

  Server bare;
  CHECK(bare.client().Get("/plot-data")->status == 404);
}

TEST_CASE("concurrent readers") {
  Server s;
  REQUIRE(s.client().Post("/households", case_study_body(), "application/json")->status == 201);
  std::vector<std::thread> readers;
  std::atomic<int> ok{0};
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&] {
      auto c = s.client();
      for (int i = 0; i < 25; ++i) {
        auto r = c.Get("/households/case-study");
        if (r && r->status == 200) ++ok;
      }
    });
  }
  for (auto& t : readers) t.join();
  CHECK(ok.load() == 100);
}
