#include "renhd/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace renhd {

namespace {

// Fork-join pool: run_phase(fn, n) calls fn(i) for i in [0, n) across the
// workers and returns once all are done. Work is split statically so results
// never depend on scheduling.
class WorkerPool {
 public:
  explicit WorkerPool(int n_threads) : n_threads_(std::max(1, n_threads)) {
    for (int t = 1; t < n_threads_; ++t)
      threads_.emplace_back([this, t] { worker_loop(t); });
  }

  ~WorkerPool() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      shutdown_ = true;
      ++phase_;
    }
    cv_.notify_all();
    for (auto& th : threads_) th.join();
  }

  void run_phase(const std::function<void(int)>& fn, int n_items) {
    if (n_threads_ == 1 || n_items <= 1) {
      for (int i = 0; i < n_items; ++i) fn(i);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mutex_);
      fn_ = &fn;
      n_items_ = n_items;
      pending_ = n_threads_ - 1;
      ++phase_;
    }
    cv_.notify_all();
    run_slice(0);
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    rethrow_if_failed();
  }

 private:
  void run_slice(int t) {
    // Round-robin assignment keeps slice membership independent of n_items.
    try {
      for (int i = t; i < n_items_; i += n_threads_) (*fn_)(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  void worker_loop(int t) {
    long long seen = 0;
    for (;;) {
      std::unique_lock<std::mutex> lock(mutex_);
      cv_.wait(lock, [this, &seen] { return phase_ != seen; });
      seen = phase_;
      if (shutdown_) return;
      lock.unlock();
      run_slice(t);
      lock.lock();
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }

  void rethrow_if_failed() {
    if (error_) {
      auto err = error_;
      error_ = nullptr;
      std::rethrow_exception(err);
    }
  }

  int n_threads_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* fn_ = nullptr;
  int n_items_ = 0;
  int pending_ = 0;
  long long phase_ = 0;
  bool shutdown_ = false;
  std::exception_ptr error_;
};

constexpr std::uint32_t kCheckpointMagic = 0x524e4844u;  // "RNHD"

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

template <typename T>
std::uint64_t fnv1a_value(std::uint64_t h, const T& value) {
  return fnv1a(h, &value, sizeof(value));
}

template <typename T>
void write_raw(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
void read_raw(std::istream& is, T& value) {
  is.read(reinterpret_cast<char*>(&value), sizeof(value));
}

}  // namespace

std::uint64_t config_fingerprint(const TemperatureLadder& ladder,
                                 const DynamicsConfig& d_cfg,
                                 const ExchangeConfig& x_cfg, int dim,
                                 std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull;
  h = fnv1a_value(h, ladder.tau);
  h = fnv1a_value(h, ladder.rungs);
  h = fnv1a_value(h, d_cfg.epsilon);
  h = fnv1a_value(h, d_cfg.c);
  h = fnv1a_value(h, d_cfg.traj_len);
  h = fnv1a_value(h, d_cfg.batch_size_nhd);
  h = fnv1a_value(h, static_cast<int>(d_cfg.thermostat_per_dim));
  h = fnv1a_value(h, x_cfg.sigma2_star);
  h = fnv1a_value(h, x_cfg.lambda);
  h = fnv1a_value(h, x_cfg.n_terms);
  h = fnv1a_value(h, x_cfg.batch_size_re);
  h = fnv1a_value(h, static_cast<int>(x_cfg.pair_schedule));
  h = fnv1a_value(h, x_cfg.exchange_every);
  h = fnv1a_value(h, dim);
  h = fnv1a_value(h, seed);
  return h;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint file for writing: " + path);
  const std::uint32_t version = 1;
  write_raw(os, kCheckpointMagic);
  write_raw(os, version);
  write_raw(os, ckpt.config_hash);
  write_raw(os, ckpt.seed);
  write_raw(os, static_cast<std::int32_t>(ckpt.iteration));
  write_raw(os, static_cast<std::int32_t>(ckpt.replicas.size()));
  const std::int32_t dim = ckpt.replicas.empty() ? 0 : ckpt.replicas[0].dim();
  write_raw(os, dim);
  for (const auto& replica : ckpt.replicas) {
    write_raw(os, replica.temperature);
    os.write(reinterpret_cast<const char*>(replica.theta.data()),
             dim * static_cast<std::streamsize>(sizeof(double)));
    os.write(reinterpret_cast<const char*>(replica.v.data()),
             dim * static_cast<std::streamsize>(sizeof(double)));
    write_raw(os, replica.s);
  }
  write_raw(os, static_cast<std::int32_t>(ckpt.rng_states.size()));
  for (const auto& state : ckpt.rng_states) {
    write_raw(os, static_cast<std::int32_t>(state.size()));
    os.write(state.data(), static_cast<std::streamsize>(state.size()));
  }
  if (!os) throw IoError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint file: " + path);
  std::uint32_t magic = 0, version = 0;
  read_raw(is, magic);
  read_raw(is, version);
  if (!is || magic != kCheckpointMagic)
    throw IoError("not a checkpoint file: " + path);
  if (version != 1) throw IoError("unsupported checkpoint version");
  Checkpoint ckpt;
  read_raw(is, ckpt.config_hash);
  read_raw(is, ckpt.seed);
  std::int32_t iteration = 0, n_replicas = 0, dim = 0;
  read_raw(is, iteration);
  read_raw(is, n_replicas);
  read_raw(is, dim);
  if (!is || n_replicas < 1 || dim < 1)
    throw IoError("corrupt checkpoint header: " + path);
  ckpt.iteration = iteration;
  ckpt.replicas.resize(n_replicas);
  for (auto& replica : ckpt.replicas) {
    read_raw(is, replica.temperature);
    replica.theta.resize(dim);
    replica.v.resize(dim);
    is.read(reinterpret_cast<char*>(replica.theta.data()),
            dim * static_cast<std::streamsize>(sizeof(double)));
    is.read(reinterpret_cast<char*>(replica.v.data()),
            dim * static_cast<std::streamsize>(sizeof(double)));
    read_raw(is, replica.s);
  }
  std::int32_t n_states = 0;
  read_raw(is, n_states);
  if (!is || n_states < 0) throw IoError("corrupt checkpoint: " + path);
  ckpt.rng_states.resize(n_states);
  for (auto& state : ckpt.rng_states) {
    std::int32_t len = 0;
    read_raw(is, len);
    if (!is || len < 0) throw IoError("corrupt checkpoint: " + path);
    state.resize(len);
    is.read(state.data(), len);
  }
  if (!is) throw IoError("truncated checkpoint: " + path);
  return ckpt;
}

RunRecord run(const Target& target, const TemperatureLadder& ladder,
              const DynamicsConfig& d_cfg, const ExchangeConfig& x_cfg,
              int iterations, std::uint64_t seed, const RunControl& ctl) {
  d_cfg.validate();
  x_cfg.validate();
  if (iterations < 0) throw ConfigError("run: iterations must be >= 0");
  if (ladder.size() < 1) throw ConfigError("run: empty ladder");

  const int n_replicas = ladder.size();
  const int d = target.dim();
  const auto t_start = std::chrono::steady_clock::now();

  const std::uint64_t fingerprint =
      config_fingerprint(ladder, d_cfg, x_cfg, d, seed);

  // Streams 0..M belong to the replicas, stream M+1 to the exchange scheduler.
  std::vector<RngStream> streams;
  streams.reserve(n_replicas + 1);
  for (int j = 0; j <= n_replicas; ++j) streams.emplace_back(seed, j);
  RngStream& scheduler = streams.back();

  std::vector<ReplicaState> replicas(n_replicas);
  int start_iteration = 0;

  if (ctl.resume != nullptr) {
    const Checkpoint& ckpt = *ctl.resume;
    if (ckpt.config_hash != fingerprint)
      throw ConfigError("resume: checkpoint was written by a different configuration");
    if (static_cast<int>(ckpt.replicas.size()) != n_replicas ||
        static_cast<int>(ckpt.rng_states.size()) != n_replicas + 1)
      throw ConfigError("resume: checkpoint shape mismatch");
    replicas = ckpt.replicas;
    for (int j = 0; j <= n_replicas; ++j) {
      std::istringstream state(ckpt.rng_states[j]);
      streams[j].load_state(state);
    }
    start_iteration = ckpt.iteration;
  } else {
    for (int j = 0; j < n_replicas; ++j) {
      replicas[j] = init_replica(ladder.temperatures[j], d_cfg, d, streams[j]);
      replicas[j].theta = streams[j].normal_vector(d);
    }
  }

  const CompensationDensity density =
      (n_replicas >= 2)
          ? build_series(x_cfg.sigma2_star, x_cfg.lambda, x_cfg.n_terms)
          : CompensationDensity{};

  RunRecord record;
  record.seed = seed;
  record.config_hash = fingerprint;
  record.n_replicas = n_replicas;
  record.iterations = iterations;
  record.samples.reserve(iterations);

  const int n_threads =
      (ctl.n_threads > 0) ? std::min(ctl.n_threads, n_replicas) : n_replicas;
  WorkerPool pool(n_threads);

  auto checkpoint_now = [&](int iteration) {
    Checkpoint ckpt;
    ckpt.config_hash = fingerprint;
    ckpt.seed = seed;
    ckpt.iteration = iteration;
    ckpt.replicas = replicas;
    ckpt.rng_states.resize(n_replicas + 1);
    for (int j = 0; j <= n_replicas; ++j) {
      std::ostringstream state;
      streams[j].save_state(state);
      ckpt.rng_states[j] = state.str();
    }
    save_checkpoint(ctl.checkpoint_path, ckpt);
  };

  // Phase parity is derivable from the iteration count, so resume picks up
  // the even-odd schedule where the checkpointed run left off.
  int exchange_phase = start_iteration / x_cfg.exchange_every;
  for (int iter = start_iteration; iter < iterations; ++iter) {
    const long long step_offset =
        static_cast<long long>(iter) * d_cfg.traj_len;
    pool.run_phase(
        [&](int j) {
          ThermostatTrace* trace = (j == 0) ? ctl.trace0 : nullptr;
          try {
            evolve(replicas[j], target, d_cfg, streams[j], trace, step_offset, j);
          } catch (const DivergenceError& err) {
            std::ostringstream msg;
            msg << "replica " << j << " diverged at iteration " << iter << ": "
                << err.what();
            throw DivergenceError(msg.str(), j, err.step);
          }
        },
        n_replicas);
    record.total_steps += static_cast<long long>(n_replicas) * d_cfg.traj_len;

    if (n_replicas >= 2 && (iter + 1) % x_cfg.exchange_every == 0) {
      std::vector<std::pair<int, int>> pairs;
      if (x_cfg.pair_schedule == PairSchedule::EvenOdd)
        pairs = pair_schedule(n_replicas, exchange_phase);
      else
        pairs = random_adjacent_pairs(n_replicas, scheduler);
      // Scheduler draws are consumed in pair-index order.
      for (const auto& [j, k] : pairs)
        record.attempts.push_back(attempt_exchange(replicas[j], replicas[k],
                                                   target, x_cfg, density,
                                                   scheduler, exchange_phase, j, k));
      ++exchange_phase;
    }

    record.samples.push_back(replicas[0].theta);

    if (ctl.checkpoint_every > 0 && !ctl.checkpoint_path.empty() &&
        (iter + 1) % ctl.checkpoint_every == 0)
      checkpoint_now(iter + 1);
  }

  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return record;
}

std::vector<Vector> burn_in_trim(const RunRecord& record, double fraction) {
  if (!(fraction >= 0.0) || fraction >= 1.0)
    throw ConfigError("burn_in_trim: fraction must lie in [0, 1)");
  const std::size_t n = record.samples.size();
  const auto drop = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n)));
  return {record.samples.begin() + static_cast<std::ptrdiff_t>(drop),
          record.samples.end()};
}

}  // namespace renhd
