#include "nrucoex/campaign/run.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nrucoex/metrics/traffic.hpp"
#include "nrucoex/nru/gnb_mac.hpp"
#include "nrucoex/radio/scenario.hpp"
#include "nrucoex/sim/rng.hpp"
#include "nrucoex/sim/simulator.hpp"
#include "nrucoex/wigig/wigig_mac.hpp"

namespace nrucoex::campaign {

TraceSelection parse_trace_selection(std::string_view list) {
  TraceSelection t;
  std::string s(list);
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item == "cam") t.cam = true;
    else if (item == "mac") t.mac = true;
    else if (item == "frames") t.frames = true;
    else if (!item.empty()) throw std::invalid_argument("unknown trace '" + item + "' (expected cam, mac, frames)");
  }
  return t;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

const char* operator_label(int op) { return op == 0 ? "A" : "B"; }

const char* rat_label(radio::Rat r) { return r == radio::Rat::kNrU ? "NR-U" : "WiGig"; }

// Appends CSV text, keeping only the first header line.
void append_csv(std::string& out, const std::string& text) {
  if (out.empty()) {
    out = text;
    return;
  }
  const auto nl = text.find('\n');
  if (nl != std::string::npos) out += text.substr(nl + 1);
}

}  // namespace

RunResult run_simulation(const CampaignConfig& cfg, const AccessMode& mode, std::uint64_t seed,
                         const RunOptions& options) {
  const auto wall_start = std::chrono::steady_clock::now();
  RunResult result;
  result.label = mode.label;
  result.seed = seed;
  result.config_hash = cfg.hash();
  result.duration = cfg.duration;

  const radio::ScenarioParams sp = cfg.scenario_params(mode);
  result.operator_rat = sp.operator_rat;
  auto env = std::make_shared<radio::RadioEnvironment>(radio::build_environment(sp, cfg.radio_params(), seed));
  env->retain_history(options.audit);
  {
    std::ostringstream os;
    radio::write_scenario_csv(os, *env);
    result.scenario_csv = os.str();
  }

  sim::Simulator simulator;
  metrics::PacketLedger ledger;
  auto cam_trace = std::make_shared<cam::CamTrace>();
  cam_trace->record_sensing = options.audit;
  const bool trace_cam = options.trace.cam || options.audit;

  const auto record_occupancy = [&result, &env](const radio::Emission& e) {
    const int op = env->device(e.source).operator_id;
    result.occupancy_ledgers[static_cast<std::size_t>(op)].record(e.start, e.end);
    (e.rat == radio::Rat::kNrU ? result.nru_emissions : result.wigig_emissions) += 1;
  };

  std::vector<std::unique_ptr<cam::ChannelAccessManager>> cams;
  std::vector<std::unique_ptr<nru::NrGnbMac>> nr_macs;
  std::vector<std::unique_ptr<wigig::WigigBss>> bsses;
  std::vector<std::function<void(metrics::PacketId, radio::DeviceId)>> enqueue_at(env->size());

  nru::NrMacConfig mac_cfg;
  mac_cfg.mac_ahead_slots = cfg.mac_ahead_slots;
  mac_cfg.mcs_margin_db = cfg.mcs_margin_db;
  mac_cfg.harq_max_transmissions = cfg.harq_max_transmissions;
  mac_cfg.bandwidth_hz = cfg.bandwidth_hz;
  mac_cfg.overhead = cfg.overhead;
  mac_cfg.tx_power_dbm = cfg.tx_power_dbm;

  wigig::WigigConfig wcfg;
  wcfg.dcf.slot = cfg.cca_slot;
  wcfg.dcf.defer = cfg.defer;
  wcfg.dcf.cws_min = cfg.wigig_cws_min;
  wcfg.dcf.cws_max = cfg.wigig_cws_max;
  wcfg.dcf.retry_limit = cfg.wigig_retry_limit;
  wcfg.thresholds.ed_threshold_dbm = cfg.wigig_ed_threshold_dbm;
  wcfg.thresholds.preamble_threshold_dbm = cfg.wigig_preamble_threshold_dbm;
  wcfg.preamble = cfg.wigig_preamble;
  wcfg.sifs = cfg.sifs;
  wcfg.ack_duration = cfg.ack_duration;
  wcfg.ack_timeout = cfg.ack_timeout;
  wcfg.mcs_margin_db = cfg.mcs_margin_db;
  wcfg.tx_power_dbm = cfg.tx_power_dbm;
  wcfg.association_attempts = cfg.association_attempts;
  wcfg.max_aggregation = cfg.wigig_max_aggregation;

  for (const auto& bs : env->devices()) {
    if (!bs.base_station()) continue;
    std::vector<radio::DeviceId> users;
    for (const auto& d : env->devices())
      if (!d.base_station() && d.serving_cell == bs.id) users.push_back(d.id);

    if (sp.operator_rat[static_cast<std::size_t>(bs.operator_id)] == radio::Rat::kNrU) {
      cam::ChannelAccessManager::Context cctx{&simulator, env.get(), bs.id, trace_cam ? cam_trace.get() : nullptr, seed};
      cams.push_back(cam::make_cam(cctx, cfg.gnb_cam(mode.gnb)));
      cam::ChannelAccessManager* gnb_cam = cams.back().get();
      std::vector<cam::ChannelAccessManager*> ue_cams;
      for (radio::DeviceId u : users) {
        cam::ChannelAccessManager::Context uctx{&simulator, env.get(), u, trace_cam ? cam_trace.get() : nullptr, seed};
        cams.push_back(cam::make_cam(uctx, cfg.ue_cam(mode.ue)));
        cams.back()->set_cot_initiator(gnb_cam);
        ue_cams.push_back(cams.back().get());
      }
      nru::NrGnbMac::Context mctx;
      mctx.simulator = &simulator;
      mctx.environment = env.get();
      mctx.ledger = &ledger;
      mctx.gnb = bs.id;
      mctx.ues = users;
      mctx.gnb_cam = gnb_cam;
      mctx.ue_cams = ue_cams;
      mctx.on_emission = [&result, &record_occupancy, audit = options.audit](const radio::Emission& e,
                                                                            const cam::ChannelGrant& g) {
        record_occupancy(e);
        if (audit) result.granted_emissions.push_back({e, g});
      };
      nr_macs.push_back(std::make_unique<nru::NrGnbMac>(std::move(mctx), mac_cfg));
      nr_macs.back()->set_trace(options.trace.mac);
      nru::NrGnbMac* mac = nr_macs.back().get();
      for (radio::DeviceId u : users)
        enqueue_at[u] = [mac, &ledger](metrics::PacketId p, radio::DeviceId dest) {
          mac->enqueue(dest, p, ledger.packet(p).size_bytes);
        };
    } else {
      wigig::WigigBss::Context wctx;
      wctx.simulator = &simulator;
      wctx.environment = env.get();
      wctx.ledger = &ledger;
      wctx.ap = bs.id;
      wctx.stas = users;
      wctx.seed = seed;
      wctx.on_emission = record_occupancy;
      bsses.push_back(std::make_unique<wigig::WigigBss>(std::move(wctx), wcfg));
      bsses.back()->set_trace(options.trace.frames);
      wigig::WigigBss* bss = bsses.back().get();
      for (radio::DeviceId u : users)
        enqueue_at[u] = [bss, &ledger](metrics::PacketId p, radio::DeviceId dest) {
          bss->enqueue(dest, p, ledger.packet(p).size_bytes);
        };
    }
  }

  std::vector<std::unique_ptr<metrics::CbrSource>> sources;
  std::vector<std::pair<radio::DeviceId, metrics::FlowId>> flows;
  for (const auto& d : env->devices()) {
    if (d.base_station()) continue;
    metrics::CbrFlow flow;
    flow.source = d.serving_cell;
    flow.destination = d.id;
    flow.rate_bps = cfg.load_bps;
    flow.packet_bytes = static_cast<std::uint32_t>(cfg.packet_bytes);
    sim::RngStream offset(seed, "traffic", d.id);
    flow.start_offset = SimTime::ns(static_cast<std::int64_t>(
        offset.uniform_int(0, static_cast<std::uint64_t>(std::max<std::int64_t>(flow.interarrival().ticks(), 1) - 1))));
    const metrics::FlowId id = ledger.add_flow(flow);
    flows.emplace_back(d.id, id);
    auto& enqueue = enqueue_at[d.id];
    if (!enqueue) throw std::logic_error("run_simulation: user without a serving MAC");
    sources.push_back(std::make_unique<metrics::CbrSource>(
        simulator, ledger, id, [&enqueue, dest = d.id](metrics::PacketId p) { enqueue(p, dest); }));
  }

  for (auto& m : nr_macs) m->start();
  for (auto& b : bsses) b->start();
  for (auto& s : sources) s->start();

  if (!options.audit) {
    // Old emissions are only needed for SINR integration of frames still on air.
    std::function<void()> prune;
    prune = [&] {
      const SimTime now = simulator.now();
      if (now > SimTime::ms(2)) env->prune(now - SimTime::ms(2));
      simulator.schedule_in(SimTime::ms(1), prune);
    };
    simulator.schedule(SimTime::ms(1), prune);
    result.events = simulator.run_until(cfg.duration);
  } else {
    result.events = simulator.run_until(cfg.duration);
  }

  for (int op = 0; op < 2; ++op)
    result.occupancy[static_cast<std::size_t>(op)] =
        metrics::occupancy_fraction(result.occupancy_ledgers[static_cast<std::size_t>(op)], cfg.duration);

  for (const auto& [dev_id, flow] : flows) {
    const auto& d = env->device(dev_id);
    DeviceMetrics m;
    m.id = dev_id;
    m.operator_id = d.operator_id;
    m.role = d.role;
    m.latency_us = ledger.latency_samples_us(flow);
    if (!m.latency_us.empty()) m.mean_latency_us = metrics::mean(m.latency_us);
    m.goodput_mbps = ledger.goodput_bps(flow, cfg.duration) / 1e6;
    const auto& c = ledger.counters(flow);
    m.generated = c.generated;
    m.delivered = c.delivered;
    m.lost = c.lost;
    m.delivered_bytes = ledger.delivered_bits(flow) / 8;
    result.delivered_bytes[static_cast<std::size_t>(d.operator_id)] += m.delivered_bytes;
    result.devices.push_back(std::move(m));
  }

  if (options.trace.cam) {
    std::ostringstream os;
    cam_trace->write_csv(os);
    result.cam_trace_csv = os.str();
  }
  for (const auto& m : nr_macs)
    if (options.trace.mac) {
      std::ostringstream os;
      m->write_trace_csv(os);
      append_csv(result.mac_trace_csv, os.str());
    }
  if (options.trace.mac && result.mac_trace_csv.empty())
    result.mac_trace_csv = "slot_start_ns,ue,symbols,mcs,tb_bytes,harq_result\n";
  for (const auto& b : bsses)
    if (options.trace.frames) {
      std::ostringstream os;
      b->write_trace_csv(os);
      append_csv(result.frame_trace_csv, os.str());
    }
  if (options.trace.frames && result.frame_trace_csv.empty())
    result.frame_trace_csv = "t_start_ns,src,dst,bytes,mcs,retries,outcome\n";

  result.metrics_csv = format_metrics_csv(result);
  {
    std::ostringstream os;
    os << "key,value\n"
       << "label," << result.label << '\n'
       << "seed," << result.seed << '\n'
       << "config_hash," << hash_hex(result.config_hash) << '\n'
       << "operator_a," << rat_label(result.operator_rat[0]) << '\n'
       << "operator_b," << rat_label(result.operator_rat[1]) << '\n'
       << "duration_ns," << result.duration.ticks() << '\n'
       << "events," << result.events << '\n'
       << "nru_emissions," << result.nru_emissions << '\n'
       << "wigig_emissions," << result.wigig_emissions << '\n';
    result.run_info_csv = os.str();
  }

  if (options.audit) {
    result.environment = env;
    result.cam_trace = cam_trace;
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

std::string format_metrics_csv(const RunResult& r) {
  std::string out = "metric,scope,value\n";
  for (int op = 0; op < 2; ++op)
    out += std::string("occupancy,") + operator_label(op) + "," + fmt(r.occupancy[static_cast<std::size_t>(op)]) + "\n";
  for (const auto& d : r.devices)
    if (d.mean_latency_us) out += "latency_us," + std::to_string(d.id) + "," + fmt(*d.mean_latency_us) + "\n";
  for (const auto& d : r.devices) out += "goodput_mbps," + std::to_string(d.id) + "," + fmt(d.goodput_mbps) + "\n";
  return out;
}

void write_run_outputs(const std::filesystem::path& dir, const RunResult& r) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const char* name, const std::string& text) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << text;
  };
  write("scenario.csv", r.scenario_csv);
  write("metrics.csv", r.metrics_csv);
  write("run_info.csv", r.run_info_csv);
  if (!r.cam_trace_csv.empty()) write("cam_trace.csv", r.cam_trace_csv);
  if (!r.mac_trace_csv.empty()) write("mac_trace.csv", r.mac_trace_csv);
  if (!r.frame_trace_csv.empty()) write("frame_trace.csv", r.frame_trace_csv);
}

}  // namespace nrucoex::campaign
