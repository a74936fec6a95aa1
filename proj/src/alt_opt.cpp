#include "irsbeam/alt_opt.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "irsbeam/log.hpp"
#include "irsbeam/rng.hpp"

namespace irsbeam {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Seed tags for the independent substreams of one restart.
constexpr uint64_t kInitPhaseTag = 1;
constexpr uint64_t kBeamformTagBase = 1000;
constexpr uint64_t kPhaseTagBase = 2000;

struct BestIterate {
  bool set = false;
  double objective = 0.0;
  BeamformingSet W;
  PhaseProfile phase;
};

void consider(BestIterate& best, double objective, const BeamformingSet& W,
              const PhaseProfile& phase, bool maximize) {
  const bool better =
      !best.set || (maximize ? objective > best.objective : objective < best.objective);
  if (better) {
    best.set = true;
    best.objective = objective;
    best.W = W;
    best.phase = phase;
  }
}

SolveReport run_power_once(const Scenario& scenario, const ChannelSet& channels,
                           uint64_t seed) {
  const SystemConfig& config = scenario.config;
  const AlgorithmOptions& opt = scenario.options;
  const auto start = Clock::now();

  SolveReport report;
  report.seed = seed;
  PhaseProfile phase =
      initial_phase_profile(config, scenario.phase_constraints, substream_seed(seed, kInitPhaseTag));

  BestIterate best;
  BeamformingSet prev_W;
  double prev_f = std::numeric_limits<double>::infinity();
  bool have_prev = false;
  report.status = SolveStatus::IterationCap;

  for (int r = 1; r <= opt.max_outer_iterations; ++r) {
    const auto iter_start = Clock::now();

    BeamformingOptions bopt;
    bopt.seed = substream_seed(seed, kBeamformTagBase + static_cast<uint64_t>(r));
    bopt.randomization_trials = opt.trials;
    bopt.sdp = opt.sdp;
    BeamformingResult step = minimize_power_given_phase(channels, phase, config, bopt);

    if (step.status == BeamformStatus::InfeasibleTargets) {
      report.status = SolveStatus::BeamformingInfeasible;
      break;
    }
    if (step.status != BeamformStatus::Optimal) {
      if (!have_prev)
        throw std::runtime_error("power control: beamforming step failed (" +
                                 std::string(step.status == BeamformStatus::SolverFailure
                                                 ? "solver failure"
                                                 : "randomization failed") +
                                 ") on iteration 1");
      // The previous beamformer stays feasible at this phase; reuse it.
      step.W = prev_W;
      step.achieved_value = prev_f;
      step.sdr_lower_bound = prev_f;
      step.status = BeamformStatus::Optimal;
    }

    BeamformingSet W = step.W;
    double f = step.achieved_value;
    if (have_prev && prev_f < f) {
      W = prev_W;
      f = prev_f;
    }

    IterationRecord record;
    record.iteration = r;
    record.objective = f;
    record.sdr_bound = step.sdr_lower_bound;
    record.sinr = evaluate(channels, phase, W, config);
    record.wall_ms = ms_since(iter_start);
    report.trajectory.push_back(record);
    consider(best, f, W, phase, /*maximize=*/false);

    if (r >= 2) {
      const double rel = prev_f > 0.0 ? 1.0 - f / prev_f : 0.0;
      if (rel <= opt.epsilon) {
        report.status = SolveStatus::Converged;
        break;
      }
    }

    PhaseOptions popt;
    popt.seed = substream_seed(seed, kPhaseTagBase + static_cast<uint64_t>(r));
    popt.trials = opt.trials;
    popt.variant = opt.residual_variant ? PhaseVariant::Residual : PhaseVariant::Feasibility;
    popt.sdp = opt.sdp;
    auto next = find_phase(channels, W, config, scenario.phase_constraints, 1.0, popt);
    if (!next) {
      report.status = SolveStatus::PhaseStepFailed;
      break;
    }
    phase = *next;
    prev_W = W;
    prev_f = f;
    have_prev = true;
  }

  if (best.set) {
    report.final_W = best.W;
    report.final_phase = best.phase;
    report.final_objective = best.objective;
    report.final_sinr = evaluate(channels, best.phase, best.W, config);
  } else {
    report.final_phase = phase;
    for (int k = 0; k < config.num_groups(); ++k)
      report.final_W.vectors.push_back(VectorC::Zero(config.num_bs_antennas));
    report.final_sinr = evaluate(channels, phase, report.final_W, config);
  }
  report.total_wall_ms = ms_since(start);
  return report;
}

SolveReport run_maxmin_once(const Scenario& scenario, const ChannelSet& channels,
                            uint64_t seed) {
  const SystemConfig& config = scenario.config;
  const AlgorithmOptions& opt = scenario.options;
  const auto start = Clock::now();

  SolveReport report;
  report.seed = seed;
  PhaseProfile phase =
      initial_phase_profile(config, scenario.phase_constraints, substream_seed(seed, kInitPhaseTag));

  BestIterate best;
  BeamformingSet prev_W;
  double prev_t = 0.0;
  bool have_prev = false;
  report.status = SolveStatus::IterationCap;

  for (int r = 1; r <= opt.max_outer_iterations; ++r) {
    const auto iter_start = Clock::now();

    BeamformingOptions bopt;
    bopt.seed = substream_seed(seed, kBeamformTagBase + static_cast<uint64_t>(r));
    bopt.randomization_trials = opt.trials;
    bopt.bisect_tol = opt.bisect_tol;
    bopt.sdp = opt.sdp;
    BeamformingResult step = maxmin_given_phase(channels, phase, config, bopt);

    if (step.status != BeamformStatus::Optimal) {
      if (!have_prev)
        throw std::runtime_error("max-min: beamforming step failed on iteration 1");
      step.W = prev_W;
      step.achieved_value = prev_t;
      step.status = BeamformStatus::Optimal;
    }

    BeamformingSet W = step.W;
    double t = step.achieved_value;
    if (have_prev) {
      // The previous beamformer is still within budget and its scaled SINR at
      // this phase is protected by the accepted phase step.
      const SinrReport prev_eval = evaluate(channels, phase, prev_W, config);
      if (prev_eval.min_scaled_sinr > t) {
        W = prev_W;
        t = prev_eval.min_scaled_sinr;
      }
    }

    IterationRecord record;
    record.iteration = r;
    record.objective = t;
    record.sdr_bound = step.bisection_t;
    record.sinr = evaluate(channels, phase, W, config);
    record.wall_ms = ms_since(iter_start);
    report.trajectory.push_back(record);
    consider(best, t, W, phase, /*maximize=*/true);

    if (r >= 2) {
      const double rel = prev_t > 0.0 ? t / prev_t - 1.0 : (t == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      if (rel <= opt.epsilon) {
        report.status = SolveStatus::Converged;
        break;
      }
    }

    PhaseOptions popt;
    popt.seed = substream_seed(seed, kPhaseTagBase + static_cast<uint64_t>(r));
    popt.trials = opt.trials;
    popt.variant = opt.residual_variant ? PhaseVariant::Residual : PhaseVariant::Feasibility;
    popt.sdp = opt.sdp;
    auto next = find_phase(channels, W, config, scenario.phase_constraints, t, popt);
    if (!next) {
      report.status = SolveStatus::PhaseStepFailed;
      break;
    }
    phase = *next;
    prev_W = W;
    prev_t = t;
    have_prev = true;
  }

  if (best.set) {
    report.final_W = best.W;
    report.final_phase = best.phase;
    report.final_objective = best.objective;
    report.final_sinr = evaluate(channels, best.phase, best.W, config);
  } else {
    report.final_phase = phase;
    for (int k = 0; k < config.num_groups(); ++k)
      report.final_W.vectors.push_back(VectorC::Zero(config.num_bs_antennas));
    report.final_sinr = evaluate(channels, phase, report.final_W, config);
  }
  report.total_wall_ms = ms_since(start);
  return report;
}

SolveReport run_restarts(const Scenario& scenario, bool maximize) {
  scenario.validate();
  const ChannelSet channels = scenario.realize_channels();
  const AlgorithmOptions& opt = scenario.options;

  auto run_one = [&](int restart) {
    const uint64_t seed = substream_seed(opt.seed, 0x5e5 + static_cast<uint64_t>(restart));
    SolveReport r = maximize ? run_maxmin_once(scenario, channels, seed)
                             : run_power_once(scenario, channels, seed);
    r.restart_index = restart;
    r.restarts = opt.restarts;
    return r;
  };

  std::vector<SolveReport> reports;
  if (opt.jobs > 1 && opt.restarts > 1) {
    std::vector<std::future<SolveReport>> futures;
    futures.reserve(opt.restarts);
    for (int s = 0; s < opt.restarts; ++s)
      futures.push_back(std::async(std::launch::async, run_one, s));
    for (auto& f : futures) reports.push_back(f.get());
  } else {
    for (int s = 0; s < opt.restarts; ++s) reports.push_back(run_one(s));
  }

  // Deterministic reduce: strictly better objective wins, ties keep the
  // earliest restart; a restart that produced an iterate beats one that
  // failed outright.
  int best = 0;
  auto usable = [](const SolveReport& r) { return !r.trajectory.empty(); };
  for (int s = 1; s < static_cast<int>(reports.size()); ++s) {
    if (!usable(reports[s])) continue;
    if (!usable(reports[best])) {
      best = s;
      continue;
    }
    const double a = reports[s].final_objective;
    const double b = reports[best].final_objective;
    if (maximize ? a > b : a < b) best = s;
  }
  SolveReport chosen = reports[best];
  chosen.seed = opt.seed;
  return chosen;
}

}  // namespace

void Scenario::validate() const {
  config.validate();
  phase_constraints.validate(config.irs_sizes);
  switch (traffic) {
    case Traffic::Unicast:
      for (const auto& group : config.groups)
        if (group.size() != 1)
          throw std::invalid_argument("unicast requires singleton groups");
      break;
    case Traffic::Broadcast:
      if (config.num_groups() != 1)
        throw std::invalid_argument("broadcast requires a single group");
      break;
    case Traffic::Multicast:
      break;
  }
  if (channels) channels->validate(config);
  if (options.max_outer_iterations < 1)
    throw std::invalid_argument("max_outer_iterations must be >= 1");
  if (options.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
}

ChannelSet Scenario::realize_channels() const {
  if (channels) return *channels;
  return generate_channels(config, model, channel_seed);
}

PhaseProfile initial_phase_profile(const SystemConfig& config,
                                   const PhaseConstraints& constraints, uint64_t seed) {
  GaussianStream stream(seed);
  PhaseProfile profile;
  profile.amplitude_mode = constraints.amplitude_mode;
  profile.phase_mode = constraints.phase_mode;
  profile.tau = constraints.phase_mode == PhaseMode::Discrete ? constraints.tau : 0;
  for (int l = 0; l < config.num_irs(); ++l) {
    const int n = config.irs_sizes[l];
    VectorR theta(n);
    for (int i = 0; i < n; ++i) {
      const double u = stream.uniform_half_open();
      if (constraints.phase_mode == PhaseMode::Discrete) {
        const int m = std::min(constraints.tau - 1,
                               static_cast<int>(u * static_cast<double>(constraints.tau)));
        theta[i] = discrete_phase(m, constraints.tau);
      } else {
        theta[i] = kTwoPi * u;
      }
    }
    profile.amplitudes.push_back(constraints.amplitude_targets(config.irs_sizes, l));
    profile.phases.push_back(std::move(theta));
  }
  return profile;
}

SolveReport solve_power_control(const Scenario& scenario) {
  if (scenario.problem != ProblemKind::PowerQos)
    throw std::invalid_argument("solve_power_control expects a power_qos scenario");
  return run_restarts(scenario, /*maximize=*/false);
}

SolveReport solve_maxmin(const Scenario& scenario) {
  if (scenario.problem != ProblemKind::MaxminQos)
    throw std::invalid_argument("solve_maxmin expects a maxmin_qos scenario");
  return run_restarts(scenario, /*maximize=*/true);
}

SolveReport solve_scenario(const Scenario& scenario) {
  return scenario.problem == ProblemKind::PowerQos ? solve_power_control(scenario)
                                                   : solve_maxmin(scenario);
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::PhaseStepFailed: return "phase_step_failed";
    case SolveStatus::BeamformingInfeasible: return "beamforming_infeasible";
    case SolveStatus::IterationCap: return "iteration_cap";
  }
  return "unknown";
}

}  // namespace irsbeam
