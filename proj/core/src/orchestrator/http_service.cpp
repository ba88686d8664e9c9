#include "pantry/orchestrator/http_service.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "pantry/budget/budget.hpp"
#include "pantry/error.hpp"
#include "pantry/kb/io.hpp"

namespace pantry::orchestrator {

namespace {

using nlohmann::json;

json budget_json(const budget::WeeklyBudget& b) {
  return {{"amount", b.amount},
          {"food_share", b.food_share},
          {"monthly_income", b.monthly_income},
          {"fixed_expenses", b.fixed_expenses},
          {"disposable", b.disposable},
          {"share_budget", b.share_budget},
          {"clamped", b.clamped}};
}

json diagnosis_json(const diet::InfeasibilityDiagnosis& d) {
  json out{{"kind", diet::to_string(d.kind)}, {"unsatisfiable_nutrients", d.unsatisfiable_nutrients},
           {"summary", d.summary()}};
  out["minimum_budget"] = d.minimum_budget ? json(*d.minimum_budget) : json();
  return out;
}

json events_json(const std::vector<WorkflowEvent>& events) {
  json out = json::array();
  for (const auto& e : events) out.push_back({{"kind", to_string(e.kind)}, {"sequence", e.sequence}});
  return out;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& kind, const std::string& message,
                 json extra = json::object()) {
  extra["schema"] = 1;
  extra["error"] = kind;
  extra["message"] = message;
  reply(res, status, extra);
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ValidationError("body", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

struct HttpService::Impl {
  Orchestrator& orchestrator;
  kb::KnowledgeBase& store;
  ServiceOptions options;
  httplib::Server server;

  Impl(Orchestrator& o, kb::KnowledgeBase& s, ServiceOptions opts)
      : orchestrator(o), store(s), options(std::move(opts)) {
    routes();
  }

  // Runs a handler and maps library errors onto status codes.
  template <class F>
  httplib::Server::Handler guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const CycleInfeasibleError& e) {
        reply_error(res, 422, "infeasible", e.what(),
                    {{"diagnosis", diagnosis_json(e.diagnosis())}, {"explanation", explanation_to_json(e.explanation())}});
      } catch (const diet::InfeasiblePlanError& e) {
        reply_error(res, 422, "infeasible", e.what(), {{"diagnosis", diagnosis_json(e.diagnosis())}});
      } catch (const ValidationError& e) {
        reply_error(res, 400, "validation", e.what(), {{"field", e.field()}});
      } catch (const ParseError& e) {
        reply_error(res, 400, "parse", e.what());
      } catch (const json::exception& e) {
        reply_error(res, 400, "validation", e.what());
      } catch (const BudgetError& e) {
        reply_error(res, 422, "budget", e.what(), {{"field", "fixed_expenses"}});
      } catch (const MissingPriceError& e) {
        reply_error(res, 409, "missing-price", e.what(), {{"items", e.item_ids()}});
      } catch (const LookupError& e) {
        reply_error(res, 404, "not-found", e.what());
      } catch (const Error& e) {
        reply_error(res, 422, "error", e.what());
      } catch (const std::exception& e) {
        reply_error(res, 500, "internal", e.what());
      }
    };
  }

  void routes() {
    server.Get("/healthz", guarded([](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"status", "ok"}});
    }));

    server.Post("/households", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto profile = kb::household_from_json(parse_body(req));
      auto weekly = budget::weekly_budget(profile, orchestrator.config().budget_policy);
      const bool existed = !profile.id.empty() && store.household(profile.id).has_value();
      auto id = store.put_household(std::move(profile));
      reply(res, existed ? 200 : 201, {{"schema", 1}, {"id", id}, {"weekly_budget", budget_json(weekly)}});
    }));

    server.Get(R"(/households/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto profile = store.household(req.matches[1].str());
      if (!profile) throw LookupError("unknown household '" + req.matches[1].str() + "'");
      auto weekly = budget::weekly_budget(*profile, orchestrator.config().budget_policy);
      reply(res, 200, {{"schema", 1}, {"household", kb::household_to_json(*profile)},
                       {"weekly_budget", budget_json(weekly)}});
    }));

    server.Post(R"(/households/([^/]+)/plan)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      kb::Timestamp as_of = 0;
      if (req.has_param("as_of")) {
        try {
          as_of = std::stoll(req.get_param_value("as_of"));
        } catch (const std::exception&) {
          throw ValidationError("as_of", "must be an integer timestamp");
        }
      } else {
        auto latest = store.latest_timestamp();
        if (!latest) throw MissingPriceError({});
        as_of = *latest;
      }
      auto cycle = orchestrator.run_weekly_cycle(req.matches[1].str(), as_of);
      reply(res, 200, {{"schema", 1},
                       {"plan", kb::plan_to_json(cycle.plan)},
                       {"shopping_list", shopping_list_to_json(cycle.shopping)},
                       {"explanation", explanation_to_json(cycle.explanation)},
                       {"weekly_budget", budget_json(cycle.budget)},
                       {"events", events_json(cycle.events)}});
    }));

    server.Post("/prices", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto quotes = kb::parse_price_batch(req.body);
      auto report = orchestrator.ingest_prices(quotes);
      reply(res, 200, {{"schema", 1}, {"stored", report.stored}, {"replanned", report.replanned},
                       {"failed", report.failed}});
    }));

    server.Post(R"(/households/([^/]+)/whatif)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto body = parse_body(req);
      if (!body.is_object() || !body.contains("item_id") || !body.at("item_id").is_string()) {
        throw ValidationError("item_id", "required string");
      }
      if (!body.contains("rel_change") || !body.at("rel_change").is_number()) {
        throw ValidationError("rel_change", "required number");
      }
      auto result = orchestrator.what_if(req.matches[1].str(), body.at("item_id").get<std::string>(),
                                         body.at("rel_change").get<double>());
      reply(res, 200, {{"schema", 1},
                       {"persisted", false},
                       {"baseline_cost", result.baseline.total_cost},
                       {"cost_delta", result.cost_delta},
                       {"adequacy_delta", result.adequacy_delta},
                       {"old_cost_revalued", result.trace.old_cost_revalued},
                       {"plan", kb::plan_to_json(result.plan)},
                       {"trace", price::trace_to_json(result.trace)}});
    }));

    server.Get(R"(/households/([^/]+)/history)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto id = req.matches[1].str();
      if (!store.household(id)) throw LookupError("unknown household '" + id + "'");
      json records = json::array();
      for (const auto& record : store.history(id)) records.push_back(kb::plan_record_to_json(record));
      reply(res, 200, {{"schema", 1}, {"records", records}});
    }));

    server.Get("/plot-data", guarded([this](const httplib::Request&, httplib::Response& res) {
      if (!options.plot_data) throw LookupError("no plot data configured");
      std::ifstream in(*options.plot_data);
      if (!in) throw LookupError("plot data not found: " + options.plot_data->string());
      std::ostringstream text;
      text << in.rdbuf();
      res.status = 200;
      res.set_content(text.str(), "application/json");
    }));
  }
};

HttpService::HttpService(Orchestrator& orchestrator, kb::KnowledgeBase& store, ServiceOptions options)
    : impl_(std::make_unique<Impl>(orchestrator, store, std::move(options))) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(int port) {
  if (port == 0) return impl_->server.bind_to_any_port(impl_->options.host);
  return impl_->server.bind_to_port(impl_->options.host, port) ? port : -1;
}

bool HttpService::serve() {
  return impl_->server.listen_after_bind();
}

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpService::running() const { return impl_->server.is_running(); }

}  // namespace pantry::orchestrator
