#include "pagesplit/resilience.hpp"

#include <thread>

namespace pagesplit {

void SystemClock::sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

void VirtualClock::sleep_for(std::chrono::milliseconds d) {
  std::lock_guard lock(mu_);
  sleeps_.push_back(d);
}

std::vector<std::chrono::milliseconds> VirtualClock::sleeps() const {
  std::lock_guard lock(mu_);
  return sleeps_;
}

std::chrono::milliseconds VirtualClock::elapsed() const {
  std::lock_guard lock(mu_);
  std::chrono::milliseconds total{0};
  for (auto d : sleeps_) total += d;
  return total;
}

void ConcurrencyGate::acquire() {
  std::unique_lock lock(mu_);
  if (limit_ > 0) cv_.wait(lock, [this] { return in_flight_ < limit_; });
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
}

void ConcurrencyGate::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

int ConcurrencyGate::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

int ConcurrencyGate::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

std::shared_ptr<ConcurrencyGate> ConcurrencyGate::shared_for(const ModelConfig& model) {
  static std::mutex registry_mu;
  static std::map<std::string, std::weak_ptr<ConcurrencyGate>> registry;
  const std::string key =
      model.endpoint + '\n' + model.model_name + '\n' + std::to_string(model.concurrency_limit);
  std::lock_guard lock(registry_mu);
  auto& slot = registry[key];
  if (auto gate = slot.lock()) return gate;
  auto gate = std::make_shared<ConcurrencyGate>(model.concurrency_limit);
  slot = gate;
  return gate;
}

ResilientProvider::ResilientProvider(std::shared_ptr<ChatProvider> inner, int retry_budget,
                                     std::chrono::milliseconds backoff_base,
                                     std::shared_ptr<ConcurrencyGate> gate,
                                     std::shared_ptr<Clock> clock)
    : inner_(std::move(inner)),
      retry_budget_(std::max(1, retry_budget)),
      backoff_base_(backoff_base),
      gate_(gate ? std::move(gate) : std::make_shared<ConcurrencyGate>(0)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()) {}

ChatResponse ResilientProvider::complete(const ChatRequest& request) {
  for (int attempt = 1;; ++attempt) {
    try {
      ChatResponse response;
      {
        ConcurrencyGate::Permit permit(*gate_);
        response = inner_->complete(request);
      }
      response.attempts = attempt;
      return response;
    } catch (const ScriptGapError&) {
      throw;
    } catch (const ProviderError& e) {
      if (!e.retryable() || attempt >= retry_budget_) {
        throw ProviderError(e.what(), e.status(), e.retryable(), attempt);
      }
    }
    clock_->sleep_for(backoff_base_ * (1LL << (attempt - 1)));
  }
}

}  // namespace pagesplit
