#include "oramlab/construction.hpp"

#include <cmath>

namespace oramlab {

namespace {

class OramSession final : public Session {
 public:
  explicit OramSession(std::unique_ptr<Oram> oram) : oram_(std::move(oram)) {}

  void feed(const LogicalAccess& a, ObservedTrace& out) override {
    if (a.op == Op::Halt) return;
    auto r = oram_->access(a.op, a.addr, a.data);
    if (r.overflow) throw StashOverflow("stash overflow");
    emitted_ += r.emitted.size();
    out.insert(out.end(), r.emitted.begin(), r.emitted.end());
  }

  BigUint finish(ObservedTrace&, std::uint64_t) override { return emitted_; }

 private:
  std::unique_ptr<Oram> oram_;
  std::uint64_t emitted_ = 0;
};

class OramConstruction final : public Construction {
 public:
  OramConstruction(std::string name, OramFactory f) : name_(std::move(name)), factory_(std::move(f)) {}
  std::string name() const override { return name_; }
  std::unique_ptr<Session> start(std::uint64_t seed) const override {
    return std::make_unique<OramSession>(factory_(seed));
  }

 private:
  std::string name_;
  OramFactory factory_;
};

class BogusSession final : public Session {
 public:
  BogusSession(BogusConfig cfg, InnerRam inner) : cfg_(cfg), inner_(std::move(inner)) {}
  void feed(const LogicalAccess& a, ObservedTrace&) override { input_.push_back(a); }
  BigUint finish(ObservedTrace& out, std::uint64_t budget) override {
    const auto plan = bogus_wrap(inner_, input_, cfg_);
    const auto p = bogus_prefix(plan, budget);
    out.insert(out.end(), p.begin(), p.end());
    return plan.total_length;
  }

 private:
  BogusConfig cfg_;
  InnerRam inner_;
  LogicalTrace input_;
};

class BogusConstruction final : public Construction {
 public:
  BogusConstruction(BogusConfig cfg, InnerRam inner) : cfg_(cfg), inner_(std::move(inner)) { cfg_.validate(); }
  std::string name() const override { return "bogus"; }
  std::unique_ptr<Session> start(std::uint64_t) const override {
    return std::make_unique<BogusSession>(cfg_, inner_);
  }

 private:
  BogusConfig cfg_;
  InnerRam inner_;
};

class PeriodicSession final : public Session {
 public:
  PeriodicSession(const PeriodicSessionConfig& cfg, std::unique_ptr<Oram> oram, std::uint64_t seed)
      : cfg_(cfg), oram_(std::move(oram)), sched_(*oram_), arrivals_(derive_seed(seed, 0xA, 0)) {}

  void feed(const LogicalAccess& a, ObservedTrace& out) override {
    if (a.op == Op::Halt) return;
    clock_ += -std::log1p(-uniform_unit(arrivals_)) * cfg_.mean_interarrival;
    const Tick arrival = static_cast<Tick>(std::ceil(clock_));
    while (next_slot() < arrival) run_slot(out, true);
    sched_.enqueue(a);
  }

  BigUint finish(ObservedTrace& out, std::uint64_t budget) override {
    while (!sched_.idle()) {
      const bool keep = budget > 0;
      if (keep) --budget;
      run_slot(out, keep);
    }
    return slots_;
  }

 private:
  Tick next_slot() const { return (slots_ + 1) * cfg_.o_int; }
  void run_slot(ObservedTrace& out, bool keep) {
    const auto a = sched_.slot(next_slot());
    ++slots_;
    if (keep) out.push_back(a);
  }

  PeriodicSessionConfig cfg_;
  std::unique_ptr<Oram> oram_;
  PeriodicScheduler sched_;
  Rng arrivals_;
  double clock_ = 0.0;
  std::uint64_t slots_ = 0;
};

class PeriodicConstruction final : public Construction {
 public:
  PeriodicConstruction(PeriodicSessionConfig cfg, OramFactory inner, std::string inner_name)
      : cfg_(cfg), inner_(std::move(inner)), inner_name_(std::move(inner_name)) {
    if (cfg_.o_int == 0) throw ConfigError("o_int must be at least 1 tick");
    if (!(cfg_.mean_interarrival > 0)) throw ConfigError("mean inter-arrival time must be positive");
  }
  std::string name() const override { return "periodic(" + inner_name_ + ")"; }
  std::unique_ptr<Session> start(std::uint64_t seed) const override {
    return std::make_unique<PeriodicSession>(cfg_, inner_(seed), seed);
  }

 private:
  PeriodicSessionConfig cfg_;
  OramFactory inner_;
  std::string inner_name_;
};

class PeekingSession final : public Session {
 public:
  explicit PeekingSession(const OramConfig& cfg) : oram_(cfg) {}

  void feed(const LogicalAccess& a, ObservedTrace& out) override {
    if (a.op == Op::Halt) return;
    if (pending_) release(out, a.addr & 1);
    pending_ = a;
  }
  BigUint finish(ObservedTrace& out, std::uint64_t budget) override {
    if (pending_) {
      ObservedTrace tail;
      release(tail, 0);
      if (budget > 0) out.insert(out.end(), tail.begin(), tail.end());
    }
    return count_;
  }

 private:
  void release(ObservedTrace& out, std::uint64_t flip) {
    auto r = oram_.access(pending_->op, pending_->addr, pending_->data);
    for (auto& e : r.emitted) e.leaf ^= flip;
    count_ += r.emitted.size();
    out.insert(out.end(), r.emitted.begin(), r.emitted.end());
    pending_.reset();
  }

  PathOram oram_;
  std::optional<LogicalAccess> pending_;
  std::uint64_t count_ = 0;
};

class PeekingConstruction final : public Construction {
 public:
  explicit PeekingConstruction(OramConfig cfg) : cfg_(cfg) {}
  std::string name() const override { return "future-peeking"; }
  std::unique_ptr<Session> start(std::uint64_t seed) const override {
    auto c = cfg_;
    c.seed = seed;
    return std::make_unique<PeekingSession>(c);
  }

 private:
  OramConfig cfg_;
};

}  // namespace

std::shared_ptr<Construction> make_oram_construction(std::string name, OramFactory factory) {
  return std::make_shared<OramConstruction>(std::move(name), std::move(factory));
}

std::shared_ptr<Construction> make_path_oram(const OramConfig& cfg) {
  cfg.validate();
  return make_oram_construction("path", [cfg](std::uint64_t seed) {
    auto c = cfg;
    c.seed = seed;
    return std::make_unique<PathOram>(c);
  });
}

std::shared_ptr<Construction> make_recursive_oram(const OramConfig& cfg, const RecursionConfig& rc) {
  cfg.validate();
  rc.validate();
  return make_oram_construction("recursive", [cfg, rc](std::uint64_t seed) {
    auto c = cfg;
    c.seed = seed;
    return std::make_unique<RecursiveOram>(c, rc);
  });
}

std::shared_ptr<Construction> make_bogus(const BogusConfig& cfg, InnerRam inner) {
  return std::make_shared<BogusConstruction>(cfg, std::move(inner));
}

std::shared_ptr<Construction> make_periodic(const PeriodicSessionConfig& cfg, OramFactory inner,
                                            std::string inner_name) {
  return std::make_shared<PeriodicConstruction>(cfg, std::move(inner), std::move(inner_name));
}

std::shared_ptr<Construction> make_future_peeking(const OramConfig& cfg) {
  cfg.validate();
  return std::make_shared<PeekingConstruction>(cfg);
}

}  // namespace oramlab
