#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uavcf/access.hpp"
#include "uavcf/channels.hpp"
#include "uavcf/config.hpp"
#include "uavcf/experiments.hpp"
#include "uavcf/fronthaul.hpp"
#include "uavcf/optimizer.hpp"
#include "uavcf/powermodel.hpp"
#include "uavcf/socp.hpp"
#include "uavcf/topology.hpp"

namespace py = pybind11;
using namespace uavcf;

PYBIND11_MODULE(_uavcf, m) {
  m.doc() = "UAV cell-free massive MIMO downlink simulator core";

  py::class_<Position3D>(m, "Position3D")
      .def(py::init<>())
      .def_readwrite("x", &Position3D::x)
      .def_readwrite("y", &Position3D::y)
      .def_readwrite("z", &Position3D::z);

  py::class_<TopologyConfig>(m, "TopologyConfig")
      .def(py::init<>())
      .def_readwrite("num_uavs", &TopologyConfig::num_uavs)
      .def_readwrite("num_ues", &TopologyConfig::num_ues)
      .def_readwrite("area_side_m", &TopologyConfig::area_side_m)
      .def_readwrite("uav_height_m", &TopologyConfig::uav_height_m)
      .def_readwrite("cpu_height_m", &TopologyConfig::cpu_height_m);

  py::class_<NetworkTopology>(m, "NetworkTopology")
      .def_readonly("cpu", &NetworkTopology::cpu)
      .def_readonly("uavs", &NetworkTopology::uavs)
      .def_readonly("ues", &NetworkTopology::ues)
      .def_readonly("area_side", &NetworkTopology::area_side)
      .def_readonly("seed", &NetworkTopology::seed)
      .def("to_json", &topology_to_json)
      .def_static("from_json", &topology_from_json);

  py::class_<PathLossParams>(m, "PathLossParams")
      .def(py::init<>())
      .def_readwrite("eta1", &PathLossParams::eta1)
      .def_readwrite("eta2", &PathLossParams::eta2)
      .def_readwrite("excess_los_db", &PathLossParams::excess_los_db)
      .def_readwrite("excess_nlos_db", &PathLossParams::excess_nlos_db)
      .def_readwrite("carrier_hz", &PathLossParams::carrier_hz);

  m.def("generate_topology", &generate_topology, py::arg("config"), py::arg("seed"));
  m.def("elevation_angle", &elevation_angle);
  m.def("los_probability", &los_probability);
  m.def("mean_path_loss_db", &mean_path_loss_db);

  py::enum_<SplitOption>(m, "SplitOption")
      .value("Option8", SplitOption::Option8)
      .value("Option72", SplitOption::Option72);
  py::enum_<Band>(m, "Band").value("Sub6", Band::Sub6).value("MmWave", Band::MmWave);

  py::class_<FronthaulConfig>(m, "FronthaulConfig")
      .def(py::init<>())
      .def_readwrite("bandwidth_hz", &FronthaulConfig::bandwidth_hz)
      .def_readwrite("noise_psd_w_per_hz", &FronthaulConfig::noise_psd_w_per_hz)
      .def_readwrite("max_power_w", &FronthaulConfig::max_power_w)
      .def_readwrite("sampling_rate_hz", &FronthaulConfig::sampling_rate_hz)
      .def_readwrite("quantizer_bits", &FronthaulConfig::quantizer_bits)
      .def_readwrite("used_subcarriers", &FronthaulConfig::used_subcarriers)
      .def_readwrite("ofdm_symbol_s", &FronthaulConfig::ofdm_symbol_s)
      .def_readwrite("num_ap_antennas", &FronthaulConfig::num_ap_antennas);

  m.def("fronthaul_rate_requirement", &fronthaul_rate_requirement);
  m.def(
      "zf_precoder",
      [](const MatrixXcd& h, double cond_threshold) {
        const ZfPrecodingResult zf = zf_precoder(FronthaulChannel{h}, cond_threshold);
        return py::make_tuple(zf.P, zf.effective_gain, zf.inverse_gram_diag);
      },
      py::arg("H"), py::arg("cond_threshold") = 1e10,
      "Returns (P, effective_gain, inverse_gram_diag)");
  m.def("fronthaul_power_for_gain", &fronthaul_power_for_gain);
  m.def("min_bandwidth_for_gain", &min_bandwidth_for_gain, py::arg("inverse_gram_diag"),
        py::arg("rate_bps"), py::arg("noise_psd"), py::arg("power_budget_w"),
        py::arg("lo_hz") = 1e3, py::arg("hi_hz") = 100e9, py::arg("rel_tol") = 1e-4);

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def(py::init<>())
      .def_readwrite("rows", &ArrayGeometry::rows)
      .def_readwrite("cols", &ArrayGeometry::cols)
      .def_static("for_antennas", &ArrayGeometry::for_antennas);
  m.def("upa_response", &upa_response);
  m.def("local_scattering_correlation", &local_scattering_correlation, py::arg("nominal_az_deg"),
        py::arg("asd_deg"), py::arg("geometry"), py::arg("gain"), py::arg("nominal_el_deg") = 0.0);

  py::class_<AccessConfig>(m, "AccessConfig")
      .def(py::init<>())
      .def_readwrite("bandwidth_hz", &AccessConfig::bandwidth_hz)
      .def_readwrite("noise_psd_w_per_hz", &AccessConfig::noise_psd_w_per_hz)
      .def_readwrite("noise_figure_db", &AccessConfig::noise_figure_db)
      .def_readwrite("coherence_samples", &AccessConfig::coherence_samples)
      .def_readwrite("pilot_samples", &AccessConfig::pilot_samples)
      .def_readwrite("pilot_power_w", &AccessConfig::pilot_power_w)
      .def_readwrite("num_ap_antennas", &AccessConfig::num_ap_antennas)
      .def_readwrite("perfect_csi", &AccessConfig::perfect_csi)
      .def("noise_power_w", &AccessConfig::noise_power_w);

  py::class_<AccessChannelConfig>(m, "AccessChannelConfig")
      .def(py::init<>())
      .def_readwrite("pathloss", &AccessChannelConfig::pathloss)
      .def_readwrite("asd_deg", &AccessChannelConfig::asd_deg)
      .def_readwrite("num_ap_antennas", &AccessChannelConfig::num_ap_antennas);

  py::class_<SinrStatistics>(m, "SinrStatistics")
      .def_readonly("num_ues", &SinrStatistics::num_ues)
      .def_readonly("num_uavs", &SinrStatistics::num_uavs)
      .def_readonly("n_mc", &SinrStatistics::n_mc)
      .def_readonly("noise_power", &SinrStatistics::noise_power)
      .def_readonly("b", &SinrStatistics::b)
      .def_readonly("b_stderr", &SinrStatistics::b_stderr)
      .def_readonly("max_imag_ratio", &SinrStatistics::max_imag_ratio)
      .def("c", [](const SinrStatistics& s, int k, int i) { return s.c(k, i); });

  m.def(
      "estimate_sinr_statistics",
      [](const NetworkTopology& topo, const AccessChannelConfig& ch_cfg, const AccessConfig& cfg,
         int n_mc, std::uint64_t seed) {
        return estimate_sinr_statistics(topo, ch_cfg, cfg, n_mc, Rng(seed).stream("access"));
      },
      py::arg("topology"), py::arg("channel_config"), py::arg("access_config"), py::arg("n_mc"),
      py::arg("seed"));

  py::class_<PowerAllocation>(m, "PowerAllocation")
      .def(py::init<>())
      .def_static("zeros", &PowerAllocation::zeros)
      .def_readwrite("rho", &PowerAllocation::rho)
      .def_readwrite("alpha", &PowerAllocation::alpha)
      .def("transmit_power", &PowerAllocation::transmit_power)
      .def("active_count", &PowerAllocation::active_count);

  m.def("effective_sinr", [](const SinrStatistics& stats, const PowerAllocation& alloc) {
    return effective_sinr(stats, alloc).gamma;
  });
  m.def("spectral_efficiency", &spectral_efficiency);
  m.def("assign_pilots", &assign_pilots);

  py::class_<PowerModelParams>(m, "PowerModelParams")
      .def(py::init<>())
      .def_readwrite("proc_idle_w", &PowerModelParams::proc_idle_w)
      .def_readwrite("proc_slope_w", &PowerModelParams::proc_slope_w)
      .def_readwrite("proc_capacity_gops", &PowerModelParams::proc_capacity_gops)
      .def_readwrite("amplifier_static_w", &PowerModelParams::amplifier_static_w)
      .def_readwrite("transmit_slope", &PowerModelParams::transmit_slope)
      .def_readwrite("dft_size", &PowerModelParams::dft_size);

  py::class_<BatteryParams>(m, "BatteryParams")
      .def(py::init<>())
      .def_readwrite("mass_kg", &BatteryParams::mass_kg)
      .def_readwrite("energy_density_wh_per_kg", &BatteryParams::energy_density_wh_per_kg)
      .def_readwrite("mech_power_w", &BatteryParams::mech_power_w);

  py::class_<GopsBreakdown>(m, "GopsBreakdown")
      .def_readonly("filtering", &GopsBreakdown::filtering)
      .def_readonly("dft", &GopsBreakdown::dft)
      .def_readonly("total", &GopsBreakdown::total);
  m.def("processing_gops", &processing_gops);
  m.def("processing_power", &processing_power);

  py::class_<PowerBreakdown>(m, "PowerBreakdown")
      .def_readonly("processing", &PowerBreakdown::processing)
      .def_readonly("fronthaul", &PowerBreakdown::fronthaul)
      .def_readonly("amplifier_static", &PowerBreakdown::amplifier_static)
      .def_readonly("transmit", &PowerBreakdown::transmit)
      .def_readonly("total", &PowerBreakdown::total);
  m.def("total_power", &total_power);
  m.def("service_time_minutes", &service_time_minutes);

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("max_uav_power_w", &OptimizerConfig::max_uav_power_w)
      .def_readwrite("bisect_rel_tol", &OptimizerConfig::bisect_rel_tol);

  py::class_<MaxMinResult>(m, "MaxMinResult")
      .def_readonly("t_star", &MaxMinResult::t_star)
      .def_readonly("alloc", &MaxMinResult::alloc)
      .def_readonly("iterations", &MaxMinResult::iterations)
      .def_readonly("feasible", &MaxMinResult::feasible);
  m.def("solve_max_min", &solve_max_min, py::arg("stats"), py::arg("fronthaul_powers"),
        py::arg("fronthaul_budget_w"), py::arg("config") = OptimizerConfig{});

  py::class_<PowerMinResult>(m, "PowerMinResult")
      .def_readonly("feasible", &PowerMinResult::feasible)
      .def_readonly("total_power", &PowerMinResult::total_power)
      .def_readonly("alloc", &PowerMinResult::alloc)
      .def_readonly("breakdown", &PowerMinResult::breakdown);
  m.def("minimize_total_power", &minimize_total_power, py::arg("stats"), py::arg("gamma_targets"),
        py::arg("split"), py::arg("fronthaul_powers"), py::arg("power_params"),
        py::arg("fronthaul_config"), py::arg("config") = OptimizerConfig{});

  py::class_<FairPowerResult>(m, "FairPowerResult")
      .def_readonly("maxmin", &FairPowerResult::maxmin)
      .def_readonly("maxmin_power", &FairPowerResult::maxmin_power)
      .def_readonly("minimized", &FairPowerResult::minimized);
  m.def("fair_then_minimize", &fair_then_minimize, py::arg("stats"), py::arg("fronthaul_powers"),
        py::arg("split"), py::arg("power_params"), py::arg("fronthaul_config"),
        py::arg("config") = OptimizerConfig{});

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init(&default_config))
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("topology", &ExperimentConfig::topology)
      .def_readwrite("stats_trials", &ExperimentConfig::stats_trials)
      .def_readwrite("nc_values", &ExperimentConfig::nc_values)
      .def_readwrite("gamma_db_values", &ExperimentConfig::gamma_db_values)
      .def("to_json", &config_to_json)
      .def_static("from_json", &config_from_json_text);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("rows", &RunReport::rows)
      .def_readonly("any_feasible", &RunReport::any_feasible)
      .def_readonly("csv_path", &RunReport::csv_path);
  m.def("run_min_bandwidth", &run_min_bandwidth);
  m.def("run_maxmin", &run_maxmin);
  m.def("run_powermin", &run_powermin);
  m.def("run_fair_power", &run_fair_power);
  m.def("run_service_time", &run_service_time);
  m.def("run_topology", &run_topology);
}
