#include "fasbeam/sched.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fasbeam/errors.hpp"

namespace fasbeam {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::uint64_t ceil_ratio(double a, double b) {
  return a <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(a / b));
}

struct Emitter {
  InstructionStream& s;
  const AcceleratorConfig& cfg;

  void load(const std::string& phase, std::uint64_t bytes, bool weight, MemTier dst) {
    if (bytes == 0) return;
    Instruction in;
    in.cls = InstrClass::kMemoryAccess;
    in.phase = phase;
    in.bytes = bytes;
    in.src = MemTier::kOffChip;
    in.dst = dst;
    in.weight_load = weight;
    s.instructions.push_back(in);
  }
  void store(const std::string& phase, std::uint64_t bytes, MemTier src, bool spill) {
    if (bytes == 0) return;
    Instruction in;
    in.cls = InstrClass::kMemoryAccess;
    in.phase = phase;
    in.bytes = bytes;
    in.src = src;
    in.dst = MemTier::kOffChip;
    in.spill = spill;
    s.instructions.push_back(in);
  }
  void matmul(const std::string& phase, std::uint64_t macs) {
    Instruction in;
    in.cls = InstrClass::kMatrixProcessing;
    in.phase = phase;
    in.macs = macs;
    in.src = MemTier::kOnChip;
    in.dst = MemTier::kIntermediate;
    s.instructions.push_back(in);
  }
  void post(const std::string& phase, std::uint64_t elements) {
    if (elements == 0) return;
    Instruction in;
    in.cls = InstrClass::kPostProcessing;
    in.phase = phase;
    in.elements = elements;
    in.src = MemTier::kIntermediate;
    in.dst = MemTier::kIntermediate;
    s.instructions.push_back(in);
  }
};

const char* const kLayerNames[] = {"mlp_in.0", "mlp_in.1", "mlp1.0", "mlp1.1",
                                   "mlp2.0",   "mlp2.1",   "mlp3.0", "mlp3.1",
                                   "mlp4.0",   "mlp4.1",   "fc"};

}  // namespace

void AcceleratorConfig::validate() const {
  if (offchip_bus_bits == 0 || offchip_bus_bits % 8 != 0)
    throw ConfigError("off-chip bus width must be a positive multiple of 8 bits");
  if (weight_bytes_per_value == 0 || activation_bytes_per_value == 0)
    throw ConfigError("bytes per value must be positive");
  if (!(macs_per_cycle > 0.0)) throw ConfigError("macs_per_cycle must be positive");
  if (onchip_buffer_bytes == 0) throw ConfigError("on-chip buffer must be positive");
  if (!(clock_period_ns > 0.0)) throw ConfigError("clock period must be positive");
  if (instruction_bytes == 0) throw ConfigError("instruction size must be positive");
  if (!(post_elements_per_cycle > 0.0))
    throw ConfigError("post_elements_per_cycle must be positive");
}

const char* to_string(InstrClass c) {
  switch (c) {
    case InstrClass::kMemoryAccess: return "MemoryAccess";
    case InstrClass::kMatrixProcessing: return "MatrixProcessing";
    case InstrClass::kPostProcessing: return "PostProcessing";
  }
  return "?";
}

const char* to_string(MemTier t) {
  switch (t) {
    case MemTier::kOffChip: return "off-chip";
    case MemTier::kOnChip: return "on-chip";
    case MemTier::kIntermediate: return "intermediate";
  }
  return "?";
}

const char* to_string(Bound b) { return b == Bound::kMemory ? "memory-bound" : "compute-bound"; }

std::uint64_t InstructionStream::weight_load_bytes() const {
  std::uint64_t n = 0;
  for (const auto& in : instructions)
    if (in.weight_load) n += in.bytes;
  return n;
}

std::uint64_t InstructionStream::offchip_bytes() const {
  std::uint64_t n = 0;
  for (const auto& in : instructions)
    if (in.cls == InstrClass::kMemoryAccess) n += in.bytes;
  return n;
}

std::uint64_t InstructionStream::total_macs() const {
  std::uint64_t n = 0;
  for (const auto& in : instructions) n += in.macs;
  return n;
}

InstructionStream emit_instructions(const GnnDims& dims, std::size_t ues, std::size_t tasks,
                                    const AcceleratorConfig& cfg) {
  dims.validate();
  cfg.validate();
  if (tasks == 0) throw InputError("task count must be at least 1");
  if (ues == 0) throw InputError("UE count must be at least 1");

  InstructionStream s;
  s.tasks = tasks;
  s.ues = ues;
  Emitter e{s, cfg};
  const std::uint64_t rows = static_cast<std::uint64_t>(tasks) * ues;
  const std::uint64_t act = cfg.activation_bytes_per_value;
  const std::uint64_t wb = cfg.weight_bytes_per_value;
  const auto shapes = dims.layer_shapes();

  // Steps 1-2: inputs from off-chip, concatenated on-chip.
  const std::uint64_t input_elems = rows * dims.input_dim();
  e.load("input", input_elems * act, false, MemTier::kOnChip);
  e.post("input", input_elems);

  // Widths kept alive alongside a layer: the GNN-layer input waits for the
  // concat while the aggregation MLP runs, the pooled rows wait for MLP2/4.
  const std::size_t n1 = dims.mlp_in[2];
  const std::size_t n2 = dims.mlp2[2];
  const std::size_t held[] = {0, 0, 0, n1, 0, 0, 0, n2, 0, 0, 0};

  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto [in, out] = shapes[l];
    const std::string phase = kLayerNames[l];
    e.load(phase, (static_cast<std::uint64_t>(in) * out + out) * wb, true, MemTier::kOnChip);
    e.matmul(phase, rows * in * out);
    // Bias and activation per output element, plus pooling and concat where
    // the layer closes an aggregation MLP.
    std::uint64_t post = rows * out;
    if (l == 3 || l == 7) post += rows * out * (ues > 1 ? ues - 1 : 1) + rows * (held[l] + out);
    if (l + 1 == shapes.size()) post += rows * out;  // normalisation
    e.post(phase, post);

    const std::uint64_t live = rows * (in + out + held[l]) * act;
    s.peak_activation_bytes = std::max(s.peak_activation_bytes, live);
    if (live > cfg.onchip_buffer_bytes) {
      const std::uint64_t excess = live - cfg.onchip_buffer_bytes;
      e.store(phase, excess, MemTier::kIntermediate, true);
      e.load(phase, excess, false, MemTier::kIntermediate);
      s.instructions.back().spill = true;
      s.spill = true;
    }
  }

  // Step 5: beamforming results back to off-chip memory.
  e.store("writeback", rows * dims.input_dim() * act, MemTier::kOnChip, false);

  // The instruction words themselves are fetched with the inputs.
  const std::uint64_t words = s.instructions.size() + 1;
  Instruction fetch;
  fetch.cls = InstrClass::kMemoryAccess;
  fetch.phase = "input";
  fetch.bytes = words * cfg.instruction_bytes;
  fetch.src = MemTier::kOffChip;
  fetch.dst = MemTier::kOnChip;
  s.instructions.insert(s.instructions.begin(), fetch);
  return s;
}

InstructionStream emit_instructions_sequential(const GnnDims& dims, std::size_t ues,
                                               std::size_t tasks, const AcceleratorConfig& cfg) {
  if (tasks == 0) throw InputError("task count must be at least 1");
  const InstructionStream one = emit_instructions(dims, ues, 1, cfg);
  InstructionStream s = one;
  s.tasks = tasks;
  for (std::size_t t = 1; t < tasks; ++t) {
    for (Instruction in : one.instructions) {
      in.phase = "task" + std::to_string(t) + "." + in.phase;
      s.instructions.push_back(std::move(in));
    }
  }
  return s;
}

ScheduleReport simulate(const InstructionStream& stream, const AcceleratorConfig& cfg) {
  cfg.validate();
  ScheduleReport r;
  r.tasks = stream.tasks;
  r.spill = stream.spill;
  const std::uint64_t bus_bytes = cfg.offchip_bus_bits / 8;

  auto close = [&](PhaseReport& p) {
    p.memory_cycles = ceil_div(p.bytes, bus_bytes);
    p.compute_cycles = ceil_ratio(static_cast<double>(p.macs), cfg.macs_per_cycle);
    p.post_cycles = ceil_ratio(static_cast<double>(p.elements), cfg.post_elements_per_cycle);
    const std::uint64_t busy = std::max(p.memory_cycles, p.compute_cycles);
    p.cycles = busy == 0 ? 0 : busy + cfg.phase_overhead_cycles;
    p.bound = p.memory_cycles >= p.compute_cycles ? Bound::kMemory : Bound::kCompute;
    r.memory_cycles += p.memory_cycles;
    r.compute_cycles += p.compute_cycles;
    r.post_cycles += p.post_cycles;
    r.total_cycles += p.cycles;
    r.bytes += p.bytes;
    r.macs += p.macs;
    r.phases.push_back(std::move(p));
  };

  std::optional<PhaseReport> cur;
  for (const auto& in : stream.instructions) {
    if (!cur || cur->name != in.phase) {
      if (cur) close(*cur);
      cur = PhaseReport{};
      cur->name = in.phase;
    }
    if (in.cls == InstrClass::kMemoryAccess) cur->bytes += in.bytes;
    cur->macs += in.macs;
    cur->elements += in.elements;
  }
  if (cur) close(*cur);

  r.bound = r.memory_cycles > r.compute_cycles ? Bound::kMemory : Bound::kCompute;
  r.total_ns = static_cast<double>(r.total_cycles) * cfg.clock_period_ns;
  return r;
}

SweepResult sweep_tasks(const GnnDims& dims, std::size_t ues, const AcceleratorConfig& cfg,
                        std::span<const std::size_t> task_counts) {
  if (task_counts.empty()) throw InputError("task sweep needs at least one task count");
  SweepResult out;
  for (std::size_t b : task_counts) {
    out.reports.push_back(simulate(emit_instructions(dims, ues, b, cfg), cfg));
    const std::size_t n = out.reports.size();
    if (!out.flip_at && n > 1 && out.reports[n - 2].bound == Bound::kMemory &&
        out.reports[n - 1].bound == Bound::kCompute)
      out.flip_at = b;
  }
  return out;
}

double balanced_macs_per_cycle(const GnnDims& dims, std::size_t ues, std::size_t tasks,
                               const AcceleratorConfig& cfg) {
  const InstructionStream one = emit_instructions(dims, ues, 1, cfg);
  const ScheduleReport r = simulate(one, cfg);
  return static_cast<double>(tasks) * static_cast<double>(one.total_macs()) /
         static_cast<double>(r.memory_cycles);
}

void write_schedule_csv(std::ostream& out, std::span<const ScheduleReport> reports,
                        const AcceleratorConfig& cfg) {
  out << "B,phase,bytes,macs,mem_cycles,compute_cycles,phase_cycles,bound,ns\n";
  char ns[64];
  for (const auto& r : reports) {
    for (const auto& p : r.phases) {
      std::snprintf(ns, sizeof ns, "%.9g", static_cast<double>(p.cycles) * cfg.clock_period_ns);
      out << r.tasks << ',' << p.name << ',' << p.bytes << ',' << p.macs << ','
          << p.memory_cycles << ',' << p.compute_cycles << ',' << p.cycles << ','
          << to_string(p.bound) << ',' << ns << '\n';
    }
    std::snprintf(ns, sizeof ns, "%.9g", r.total_ns);
    out << r.tasks << ",total," << r.bytes << ',' << r.macs << ',' << r.memory_cycles << ',' << r.compute_cycles << ',' << r.total_cycles << ','
        << to_string(r.bound) << ',' << ns << '\n';
  }
}

}  // namespace fasbeam
