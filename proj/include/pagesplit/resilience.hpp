#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pagesplit/config.hpp"
#include "pagesplit/provider.hpp"

namespace pagesplit {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class SystemClock final : public Clock {
 public:
  void sleep_for(std::chrono::milliseconds d) override;
};

/// Records requested sleeps instead of blocking.
class VirtualClock final : public Clock {
 public:
  void sleep_for(std::chrono::milliseconds d) override;
  std::vector<std::chrono::milliseconds> sleeps() const;
  std::chrono::milliseconds elapsed() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::chrono::milliseconds> sleeps_;
};

/// Counting gate bounding in-flight provider requests. A limit <= 0 means
/// unlimited. Tracks the peak number of concurrent holders.
class ConcurrencyGate {
 public:
  explicit ConcurrencyGate(int limit) : limit_(limit) {}

  class Permit {
   public:
    explicit Permit(ConcurrencyGate& gate) : gate_(&gate) { gate_->acquire(); }
    ~Permit() {
      if (gate_ != nullptr) gate_->release();
    }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    ConcurrencyGate* gate_;
  };

  void acquire();
  void release();

  int limit() const noexcept { return limit_; }
  int in_flight() const;
  int peak() const;

  /// Process-wide gate shared by every provider using the same endpoint,
  /// model and limit.
  static std::shared_ptr<ConcurrencyGate> shared_for(const ModelConfig& model);

 private:
  const int limit_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  int peak_ = 0;
};

/// Wraps a single-attempt provider with the concurrency gate and retries.
/// The delay before attempt k + 1 is backoff_base * 2^(k - 1). The gate is
/// held only while a request is in flight, not during backoff.
class ResilientProvider final : public ChatProvider {
 public:
  ResilientProvider(std::shared_ptr<ChatProvider> inner, int retry_budget,
                    std::chrono::milliseconds backoff_base,
                    std::shared_ptr<ConcurrencyGate> gate = nullptr,
                    std::shared_ptr<Clock> clock = nullptr);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<ChatProvider> inner_;
  int retry_budget_;
  std::chrono::milliseconds backoff_base_;
  std::shared_ptr<ConcurrencyGate> gate_;
  std::shared_ptr<Clock> clock_;
};

}  // namespace pagesplit
