#include "duet/llm/gateway.hpp"

#include <thread>

#include "duet/llm/extract.hpp"

namespace duet {

Json Attempt::to_json() const {
  Json j{{"attempt", number}, {"raw", raw}, {"issues", duet::to_json(issues)}};
  j["error"] = error ? Json(*error) : Json(nullptr);
  return j;
}

Json GatewayResult::trace_json() const {
  Json arr = Json::array();
  for (const auto& a : trace) arr.push_back(a.to_json());
  return arr;
}

namespace {

Json trace_to_json(const std::vector<Attempt>& trace) {
  Json arr = Json::array();
  for (const auto& a : trace) arr.push_back(a.to_json());
  return arr;
}

// One entry per violated constraint, for the repair suffix.
std::vector<std::string> constraint_list(const Attempt& a) {
  std::vector<std::string> out;
  for (const auto& i : a.issues) {
    std::string item = i.code == IssueCode::invariant_violated ? i.name : std::string(to_string(i.code));
    item += " at " + (i.path.empty() ? std::string("/") : i.path);
    if (!i.message.empty()) item += " (" + i.message + ")";
    out.push_back(std::move(item));
  }
  if (out.empty() && a.error) out.push_back(*a.error + " (output must be a single JSON value)");
  return out;
}

}  // namespace

Gateway::Gateway(std::shared_ptr<CompletionProvider> provider, GatewayBudget budget,
                 Sleeper sleeper)
    : provider_(std::move(provider)), budget_(budget), sleeper_(std::move(sleeper)) {
  if (!provider_) throw Error(ErrorCode::config_error, "gateway without provider");
  if (budget_.max_attempts < 1) throw Error(ErrorCode::config_error, "max_attempts must be >= 1");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds Gateway::backoff(int next_attempt) noexcept {
  std::int64_t ms = 250;
  for (int i = 2; i < next_attempt; ++i) ms *= 4;
  return std::chrono::milliseconds(ms);
}

GatewayResult Gateway::complete_validated(TemplateId id, const Bindings& bindings,
                                          const GatewayHooks& hooks) const {
  const PromptTemplate& tmpl = prompt_template(id);
  const std::string base_prompt = assemble(id, bindings);
  std::vector<Attempt> trace;
  std::optional<Error> transport_failure;

  for (int n = 1; n <= budget_.max_attempts; ++n) {
    if (n > 1 && !provider_->deterministic()) sleeper_(backoff(n));

    std::string prompt = base_prompt;
    // A transport failure says nothing about the output, so only re-ask
    // with a repair suffix after extraction or validation failures.
    if (budget_.repair_enabled && !trace.empty() && !transport_failure) {
      prompt += "\n\n" + repair_suffix(constraint_list(trace.back()));
    }

    Attempt attempt;
    attempt.number = n;
    CompletionRequest request{id, &bindings, prompt, n, {}};
    request.params.timeout = budget_.per_attempt_timeout;
    try {
      attempt.raw = provider_->complete(request);
      transport_failure.reset();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::missing_fixture) throw;
      if (e.code() != ErrorCode::provider_unreachable && e.code() != ErrorCode::timeout) throw;
      attempt.error = std::string(to_string(e.code()));
      transport_failure = e;
      trace.push_back(std::move(attempt));
      continue;
    }

    Json doc;
    try {
      doc = extract_json(attempt.raw);
    } catch (const Error& e) {
      attempt.error = std::string(to_string(e.code()));
      trace.push_back(std::move(attempt));
      continue;
    }
    if (hooks.prepare) hooks.prepare(doc);
    ValidationReport report = validate(tmpl.response_schema, doc);
    attempt.issues = std::move(report.errors);
    if (attempt.issues.empty() && hooks.check) attempt.issues = hooks.check(report.normalized);
    if (!attempt.issues.empty()) {
      attempt.error = std::string(to_string(ErrorCode::validation_failed));
      trace.push_back(std::move(attempt));
      continue;
    }
    trace.push_back(std::move(attempt));
    return GatewayResult{std::move(report.normalized), std::move(trace)};
  }

  if (transport_failure) {
    throw Error(transport_failure->code(), transport_failure->what(),
                Json{{"template", std::string(to_string(id))}, {"trace", trace_to_json(trace)}});
  }
  throw Error(ErrorCode::exhausted_attempts,
              std::string(to_string(id)) + " failed " + std::to_string(trace.size()) + " attempt(s)",
              Json{{"template", std::string(to_string(id))}, {"trace", trace_to_json(trace)}});
}

}  // namespace duet
