#include "uavcf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#ifndef UAVCF_GIT_DESCRIBE
#define UAVCF_GIT_DESCRIBE "unknown"
#endif

namespace uavcf {

namespace {

constexpr const char* kGitDescribe = UAVCF_GIT_DESCRIBE;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::string path, std::string header) : path_(std::move(path)) {
    rows_.push_back(std::move(header));
  }

  template <typename... Parts>
  void row(const Parts&... parts) {
    std::string line;
    append(line, parts...);
    rows_.push_back(std::move(line));
  }

  int write() const {
    std::ofstream out(path_);
    if (!out) throw std::runtime_error("cannot write " + path_);
    for (const auto& r : rows_) out << r << "\n";
    return static_cast<int>(rows_.size()) - 1;
  }

 private:
  static void append_one(std::string& line, double v) { line += format_double(v); }
  static void append_one(std::string& line, int v) { line += std::to_string(v); }
  static void append_one(std::string& line, long v) { line += std::to_string(v); }
  static void append_one(std::string& line, std::uint64_t v) { line += std::to_string(v); }
  static void append_one(std::string& line, const char* v) { line += v; }
  static void append_one(std::string& line, const std::string& v) { line += v; }

  template <typename First, typename... Rest>
  static void append(std::string& line, const First& first, const Rest&... rest) {
    append_one(line, first);
    if constexpr (sizeof...(rest) > 0) {
      line += ",";
      append(line, rest...);
    }
  }

  std::string path_;
  std::vector<std::string> rows_;
};

struct Accumulator {
  double sum = 0.0, sumsq = 0.0;
  int n = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stderr_mean() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sumsq - n * m * m) / (n - 1.0)) / n);
  }
};

void write_manifest(const ExperimentConfig& cfg, const std::string& command, int rows,
                    double wall_s) {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = nlohmann::json::parse(config_to_json(cfg));
  j["config_hash"] = config_hash(cfg);
  j["git_describe"] = kGitDescribe;
  j["base_seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["wall_time_s"] = wall_s;
  j["rows"] = rows;
  std::ofstream out(std::filesystem::path(cfg.out_dir) / ("manifest_" + command + ".json"));
  out << j.dump(2) << "\n";
}

// Deterministic parallel map: results land in a pre-sized vector by index.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::uint64_t instance_seed(const ExperimentConfig& cfg, int trial) {
  return cfg.seed + static_cast<std::uint64_t>(trial);
}

struct FronthaulDraw {
  bool ok = false;
  ZfPrecodingResult zf;
};

FronthaulDraw draw_fronthaul(const ExperimentConfig& cfg, const NetworkTopology& topo, Band band,
                             int num_cpu_antennas, std::uint64_t seed) {
  FronthaulDraw out;
  Rng rng = Rng(seed).stream("fronthaul").stream(to_string(band));
  try {
    FronthaulChannel channel;
    if (band == Band::Sub6) {
      channel = sample_sub6_fronthaul(topo, cfg.sub6_channel_config(num_cpu_antennas), rng);
    } else {
      channel = sample_mmwave_fronthaul(topo, cfg.mmwave_channel_config(num_cpu_antennas), rng);
    }
    out.zf = zf_precoder(channel);
    out.ok = true;
  } catch (const SingularChannelError&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  Instance inst;
  inst.topo = generate_topology(cfg.topology, seed);
  inst.stats = estimate_sinr_statistics(inst.topo, cfg.access_channel, cfg.access,
                                        cfg.stats_trials, Rng(seed).stream("access"));
  return inst;
}

bool fronthaul_powers_for(const ExperimentConfig& cfg, const NetworkTopology& topo, Band band,
                          int num_cpu_antennas, std::uint64_t seed, SplitOption split,
                          VectorXd& powers) {
  const FronthaulDraw draw = draw_fronthaul(cfg, topo, band, num_cpu_antennas, seed);
  if (!draw.ok) return false;
  FronthaulConfig fh = cfg.fronthaul_for(band);
  const double rate = fronthaul_rate_requirement(split, fh);
  const int num_uavs = static_cast<int>(draw.zf.inverse_gram_diag.size());
  powers.resize(num_uavs);
  for (int l = 0; l < num_uavs; ++l) {
    powers[l] = fronthaul_power_required(draw.zf, l, rate, fh);
  }
  return true;
}

RunReport run_min_bandwidth(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path =
      (std::filesystem::path(cfg.out_dir) / "min_bandwidth.csv").string();
  CsvWriter csv(path,
                "n_c,band,split,mean_min_bandwidth_hz,stderr_hz,median_hz,feasible_fraction,"
                "config_hash,seed");
  const std::uint64_t hash = config_hash(cfg);

  struct Cell {
    int nc;
    Band band;
    SplitOption split;
    MinBandwidthResult result;
  };
  std::vector<Cell> cells;
  for (const int nc : cfg.nc_values) {
    for (const Band band : cfg.bands) {
      for (const SplitOption split : cfg.splits) cells.push_back({nc, band, split, {}});
    }
  }

  parallel_for(static_cast<int>(cells.size()), cfg.threads, [&](int idx) {
    Cell& cell = cells[idx];
    auto sampler = [&](Rng& draw_rng) {
      const std::uint64_t topo_seed = draw_rng.next_u64();
      const NetworkTopology topo = generate_topology(cfg.topology, topo_seed);
      if (cell.band == Band::Sub6) {
        return sample_sub6_fronthaul(topo, cfg.sub6_channel_config(cell.nc), draw_rng);
      }
      return sample_mmwave_fronthaul(topo, cfg.mmwave_channel_config(cell.nc), draw_rng);
    };
    // Same seed across splits/bands: paired draws for the comparisons.
    Rng rng = Rng(cfg.seed).stream("min-bandwidth");
    cell.result = min_bandwidth_single_ap(sampler, cell.split, cfg.fronthaul_for(cell.band),
                                          cfg.trials, rng);
    std::cerr << "min-bandwidth: N_c=" << cell.nc << " " << to_string(cell.band) << " "
              << to_string(cell.split) << " done\n";
  });

  bool any_feasible = false;
  for (const Cell& cell : cells) {
    const double frac = static_cast<double>(cell.result.feasible_draws) / cfg.trials;
    any_feasible |= cell.result.feasible_draws > 0;
    csv.row(cell.nc, to_string(cell.band), to_string(cell.split), cell.result.mean_hz,
            cell.result.stderr_hz, cell.result.median_hz, frac, hash, cfg.seed);
  }
  RunReport report;
  report.rows = csv.write();
  report.any_feasible = any_feasible;
  report.csv_path = path;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "min-bandwidth", report.rows, wall);
  return report;
}

RunReport run_maxmin(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "maxmin.csv").string();
  CsvWriter csv(path,
                "n_c,band,split,mean_t_star_db,stderr_db,mean_active_uavs,feasible_fraction,"
                "config_hash,seed");
  const std::uint64_t hash = config_hash(cfg);

  // Statistics are band- and N_c-independent; build instances once.
  std::vector<Instance> instances(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int i) {
    instances[i] = build_instance(cfg, instance_seed(cfg, i));
  });
  std::cerr << "maxmin: statistics ready for " << cfg.trials << " instances\n";

  struct Cell {
    int nc;
    Band band;
    SplitOption split;
    Accumulator t_db, active;
    int feasible = 0;
  };
  std::vector<Cell> cells;
  for (const int nc : cfg.nc_values) {
    for (const Band band : cfg.bands) {
      for (const SplitOption split : cfg.splits) cells.push_back({nc, band, split});
    }
  }

  std::vector<std::vector<std::pair<double, double>>> results(
      cells.size());  // (t_star, active) per feasible instance, -1 marker otherwise
  for (auto& r : results) r.assign(cfg.trials, {-1.0, 0.0});

  parallel_for(cfg.trials, cfg.threads, [&](int i) {
    const std::uint64_t seed = instance_seed(cfg, i);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const Cell& cell = cells[c];
      VectorXd powers;
      if (!fronthaul_powers_for(cfg, instances[i].topo, cell.band, cell.nc, seed, cell.split,
                                powers)) {
        continue;
      }
      const MaxMinResult res = solve_max_min(instances[i].stats, powers,
                                             cfg.fronthaul.max_power_w, cfg.optimizer);
      if (res.feasible) {
        results[c][i] = {res.t_star, static_cast<double>(res.alloc.active_count())};
      }
    }
    std::cerr << "maxmin: instance " << i << " done\n";
  });

  bool any_feasible = false;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Cell& cell = cells[c];
    for (int i = 0; i < cfg.trials; ++i) {
      if (results[c][i].first < 0.0) continue;
      cell.t_db.add(linear_to_db(results[c][i].first));
      cell.active.add(results[c][i].second);
      ++cell.feasible;
    }
    any_feasible |= cell.feasible > 0;
    csv.row(cell.nc, to_string(cell.band), to_string(cell.split), cell.t_db.mean(),
            cell.t_db.stderr_mean(), cell.active.mean(),
            static_cast<double>(cell.feasible) / cfg.trials, hash, cfg.seed);
  }
  RunReport report;
  report.rows = csv.write();
  report.any_feasible = any_feasible;
  report.csv_path = path;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "maxmin", report.rows, wall);
  return report;
}

namespace {

struct PowerMinCellResult {
  bool feasible = false;
  PowerBreakdown breakdown;
  int active = 0;
};

}  // namespace

RunReport run_powermin(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "powermin.csv").string();
  CsvWriter csv(path,
                "gamma_db,band,split,mean_total_power_w,stderr_w,mean_processing_w,"
                "mean_fronthaul_w,mean_static_w,mean_transmit_w,mean_active_uavs,"
                "feasible_fraction,low_feasibility_flag,config_hash,seed");
  const std::uint64_t hash = config_hash(cfg);

  std::vector<Instance> instances(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int i) {
    instances[i] = build_instance(cfg, instance_seed(cfg, i));
  });
  std::cerr << "powermin: statistics ready\n";

  struct Combo {
    Band band;
    SplitOption split;
  };
  std::vector<Combo> combos;
  for (const Band band : cfg.bands) {
    for (const SplitOption split : cfg.splits) combos.push_back({band, split});
  }

  // result[combo][gamma][trial]
  std::vector<std::vector<std::vector<PowerMinCellResult>>> results(combos.size());
  for (auto& per_gamma : results) {
    per_gamma.assign(cfg.gamma_db_values.size(),
                     std::vector<PowerMinCellResult>(cfg.trials));
  }

  parallel_for(cfg.trials, cfg.threads, [&](int i) {
    const std::uint64_t seed = instance_seed(cfg, i);
    for (std::size_t c = 0; c < combos.size(); ++c) {
      VectorXd powers;
      if (!fronthaul_powers_for(cfg, instances[i].topo, combos[c].band,
                                cfg.profile(combos[c].band).num_cpu_antennas, seed,
                                combos[c].split, powers)) {
        continue;
      }
      const FronthaulConfig fh = cfg.fronthaul_for(combos[c].band);
      for (std::size_t g = 0; g < cfg.gamma_db_values.size(); ++g) {
        const VectorXd gammas = VectorXd::Constant(instances[i].stats.num_ues,
                                                   db_to_linear(cfg.gamma_db_values[g]));
        const PowerMinResult res =
            minimize_total_power(instances[i].stats, gammas, combos[c].split, powers,
                                 cfg.power, fh, cfg.optimizer);
        if (res.feasible) {
          results[c][g][i] = {true, res.breakdown, res.alloc.active_count()};
        }
      }
    }
    std::cerr << "powermin: instance " << i << " done\n";
  });

  bool any_feasible = false;
  for (std::size_t g = 0; g < cfg.gamma_db_values.size(); ++g) {
    for (std::size_t c = 0; c < combos.size(); ++c) {
      Accumulator total, proc, fh, stat, tx, active;
      for (int i = 0; i < cfg.trials; ++i) {
        const PowerMinCellResult& r = results[c][g][i];
        if (!r.feasible) continue;
        total.add(r.breakdown.total);
        proc.add(r.breakdown.processing);
        fh.add(r.breakdown.fronthaul);
        stat.add(r.breakdown.amplifier_static);
        tx.add(r.breakdown.transmit);
        active.add(r.active);
      }
      const double frac = static_cast<double>(total.n) / cfg.trials;
      any_feasible |= total.n > 0;
      csv.row(cfg.gamma_db_values[g], to_string(combos[c].band), to_string(combos[c].split),
              total.mean(), total.stderr_mean(), proc.mean(), fh.mean(), stat.mean(), tx.mean(),
              active.mean(), frac, frac < 0.5 ? 1 : 0, hash, cfg.seed);
    }
  }
  RunReport report;
  report.rows = csv.write();
  report.any_feasible = any_feasible;
  report.csv_path = path;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "powermin", report.rows, wall);
  return report;
}

RunReport run_fair_power(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "fair_power.csv").string();
  const std::string summary_path =
      (std::filesystem::path(cfg.out_dir) / "fair_power_summary.csv").string();
  CsvWriter csv(path,
                "band,split,trial,t_star_db,maxmin_power_w,minimized_power_w,min_sinr_db,"
                "active_before,active_after,config_hash,seed");
  CsvWriter summary(summary_path,
                    "band,split,mean_t_star_db,mean_maxmin_power_w,mean_minimized_power_w,"
                    "feasible_fraction,config_hash,seed");
  const std::uint64_t hash = config_hash(cfg);

  std::vector<Instance> instances(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int i) {
    instances[i] = build_instance(cfg, instance_seed(cfg, i));
  });

  struct Combo {
    Band band;
    SplitOption split;
  };
  std::vector<Combo> combos;
  for (const Band band : cfg.bands) {
    for (const SplitOption split : cfg.splits) combos.push_back({band, split});
  }

  struct Row {
    bool feasible = false;
    double t_star = 0.0, before = 0.0, after = 0.0, min_sinr_db = 0.0;
    int active_before = 0, active_after = 0;
  };
  std::vector<std::vector<Row>> rows(combos.size(), std::vector<Row>(cfg.trials));

  parallel_for(cfg.trials, cfg.threads, [&](int i) {
    const std::uint64_t seed = instance_seed(cfg, i);
    for (std::size_t c = 0; c < combos.size(); ++c) {
      VectorXd powers;
      if (!fronthaul_powers_for(cfg, instances[i].topo, combos[c].band,
                                cfg.profile(combos[c].band).num_cpu_antennas, seed,
                                combos[c].split, powers)) {
        continue;
      }
      const FronthaulConfig fh = cfg.fronthaul_for(combos[c].band);
      const FairPowerResult res = fair_then_minimize(instances[i].stats, powers, combos[c].split,
                                                     cfg.power, fh, cfg.optimizer);
      if (!res.maxmin.feasible || !res.minimized.feasible) continue;
      Row& row = rows[c][i];
      row.feasible = true;
      row.t_star = res.maxmin.t_star;
      row.before = res.maxmin_power.total;
      row.after = res.minimized.total_power;
      const SinrEvaluation eval = effective_sinr(instances[i].stats, res.minimized.alloc);
      row.min_sinr_db = linear_to_db(std::max(eval.gamma.minCoeff(), 1e-30));
      row.active_before = res.maxmin.alloc.active_count();
      row.active_after = res.minimized.alloc.active_count();
    }
    std::cerr << "fair-power: instance " << i << " done\n";
  });

  bool any_feasible = false;
  for (std::size_t c = 0; c < combos.size(); ++c) {
    Accumulator t_db, before, after;
    int feasible = 0;
    for (int i = 0; i < cfg.trials; ++i) {
      const Row& row = rows[c][i];
      if (!row.feasible) continue;
      csv.row(to_string(combos[c].band), to_string(combos[c].split), i,
              linear_to_db(row.t_star), row.before, row.after, row.min_sinr_db,
              row.active_before, row.active_after, hash, instance_seed(cfg, i));
      t_db.add(linear_to_db(row.t_star));
      before.add(row.before);
      after.add(row.after);
      ++feasible;
    }
    any_feasible |= feasible > 0;
    summary.row(to_string(combos[c].band), to_string(combos[c].split), t_db.mean(), before.mean(),
                after.mean(), static_cast<double>(feasible) / cfg.trials, hash, cfg.seed);
  }
  RunReport report;
  report.rows = csv.write();
  summary.write();
  report.any_feasible = any_feasible;
  report.csv_path = path;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "fair-power", report.rows, wall);
  return report;
}

RunReport run_service_time(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "service_time.csv").string();
  CsvWriter csv(path,
                "band,split,gamma_db,mean_per_uav_comm_w,service_minutes,feasible_fraction,"
                "config_hash,seed");
  const std::uint64_t hash = config_hash(cfg);

  std::vector<Instance> instances(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int i) {
    instances[i] = build_instance(cfg, instance_seed(cfg, i));
  });

  struct Outcome {
    double minutes = 0.0;
    double per_uav = 0.0;
    double frac = 0.0;
  };
  bool any_feasible = false;
  std::vector<std::string> lines;
  for (const Band band : cfg.bands) {
    std::vector<Outcome> outcomes;
    for (const SplitOption split : cfg.splits) {
      Accumulator total, active;
      int feasible = 0;
      for (int i = 0; i < cfg.trials; ++i) {
        const std::uint64_t seed = instance_seed(cfg, i);
        VectorXd powers;
        if (!fronthaul_powers_for(cfg, instances[i].topo, band,
                                  cfg.profile(band).num_cpu_antennas, seed, split, powers)) {
          continue;
        }
        const VectorXd gammas = VectorXd::Constant(instances[i].stats.num_ues,
                                                   db_to_linear(cfg.service_gamma_db));
        const PowerMinResult res =
            minimize_total_power(instances[i].stats, gammas, split, powers, cfg.power,
                                 cfg.fronthaul_for(band), cfg.optimizer);
        if (!res.feasible || res.alloc.active_count() == 0) continue;
        total.add(res.total_power);
        active.add(res.alloc.active_count());
        ++feasible;
      }
      Outcome o;
      o.frac = static_cast<double>(feasible) / cfg.trials;
      if (feasible > 0) {
        o.per_uav = total.mean() / std::max(active.mean(), 1.0);
        o.minutes = service_time_minutes(o.per_uav, cfg.battery);
        any_feasible = true;
      }
      outcomes.push_back(o);
      csv.row(to_string(band), to_string(split), cfg.service_gamma_db, o.per_uav, o.minutes,
              o.frac, hash, cfg.seed);
    }
    if (outcomes.size() == 2 && outcomes[0].minutes > 0.0 && outcomes[1].minutes > 0.0) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "%s: %s %.1f min, %s %.1f min (%+.1f%% for the first)", to_string(band),
                    to_string(cfg.splits[0]), outcomes[0].minutes, to_string(cfg.splits[1]),
                    outcomes[1].minutes,
                    100.0 * (outcomes[0].minutes / outcomes[1].minutes - 1.0));
      lines.push_back(buf);
    }
  }
  RunReport report;
  report.rows = csv.write();
  report.any_feasible = any_feasible;
  report.csv_path = path;
  for (const auto& line : lines) std::cout << line << "\n";
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "service-time", report.rows, wall);
  return report;
}

RunReport run_topology(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "topology.json").string();
  const NetworkTopology topo = generate_topology(cfg.topology, cfg.seed);
  save_topology(topo, path);
  RunReport report;
  report.rows = 1;
  report.csv_path = path;
  write_manifest(cfg, "topology", 1, 0.0);
  return report;
}

}  // namespace uavcf
