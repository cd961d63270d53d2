#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fasbeam/gnn.hpp"

namespace fasbeam {

struct AcceleratorConfig {
  std::size_t offchip_bus_bits = 64;
  std::size_t weight_bytes_per_value = 1;
  std::size_t activation_bytes_per_value = 1;
  double macs_per_cycle = 4096.0;
  std::size_t onchip_buffer_bytes = std::size_t{1} << 20;  // activations only
  double clock_period_ns = 10.0;
  std::size_t phase_overhead_cycles = 0;
  std::size_t instruction_bytes = 8;
  double post_elements_per_cycle = 1.0;

  void validate() const;
};

enum class InstrClass { kMemoryAccess, kMatrixProcessing, kPostProcessing };
enum class MemTier { kOffChip, kOnChip, kIntermediate };

const char* to_string(InstrClass c);
const char* to_string(MemTier t);

struct Instruction {
  InstrClass cls = InstrClass::kMemoryAccess;
  std::string phase;
  std::uint64_t bytes = 0;     // MemoryAccess
  std::uint64_t macs = 0;      // MatrixProcessing
  std::uint64_t elements = 0;  // PostProcessing
  MemTier src = MemTier::kOffChip;
  MemTier dst = MemTier::kOnChip;
  bool weight_load = false;
  bool spill = false;
};

struct InstructionStream {
  std::vector<Instruction> instructions;
  std::size_t tasks = 1;
  std::size_t ues = 1;
  std::uint64_t peak_activation_bytes = 0;
  bool spill = false;

  std::uint64_t weight_load_bytes() const;
  std::uint64_t offchip_bytes() const;
  std::uint64_t total_macs() const;
};

// Parameter-shared stream for B stacked selections of K UEs: every weight is
// loaded once, each layer multiplies B*K rows, intermediates stay on-chip
// unless the live footprint of a layer exceeds the buffer, in which case the
// excess is written out and read back.
InstructionStream emit_instructions(const GnnDims& dims, std::size_t ues, std::size_t tasks,
                                    const AcceleratorConfig& cfg);
// B independent single-task streams back to back (weights reloaded per task).
InstructionStream emit_instructions_sequential(const GnnDims& dims, std::size_t ues,
                                               std::size_t tasks, const AcceleratorConfig& cfg);

enum class Bound { kMemory, kCompute };
const char* to_string(Bound b);

struct PhaseReport {
  std::string name;
  std::uint64_t bytes = 0;
  std::uint64_t macs = 0;
  std::uint64_t elements = 0;
  std::uint64_t memory_cycles = 0;
  std::uint64_t compute_cycles = 0;
  std::uint64_t post_cycles = 0;
  std::uint64_t cycles = 0;  // max(memory, compute) + overhead
  Bound bound = Bound::kMemory;
};

struct ScheduleReport {
  std::size_t tasks = 1;
  std::uint64_t total_cycles = 0;
  double total_ns = 0.0;
  std::uint64_t memory_cycles = 0;
  std::uint64_t compute_cycles = 0;
  std::uint64_t post_cycles = 0;
  std::uint64_t bytes = 0;
  std::uint64_t macs = 0;
  Bound bound = Bound::kMemory;  // memory iff sum memory > sum compute
  bool spill = false;
  std::vector<PhaseReport> phases;
};

// Phases are consecutive runs of instructions sharing a phase name. Post
// processing is reported but overlapped with the memory stream.
ScheduleReport simulate(const InstructionStream& stream, const AcceleratorConfig& cfg);

struct SweepResult {
  std::vector<ScheduleReport> reports;
  // First task count in the sweep that is compute-bound after a memory-bound one.
  std::optional<std::size_t> flip_at;
};

SweepResult sweep_tasks(const GnnDims& dims, std::size_t ues, const AcceleratorConfig& cfg,
                        std::span<const std::size_t> task_counts);

// macs_per_cycle at which B = `tasks` has equal summed compute and the
// single-task memory cycles.
double balanced_macs_per_cycle(const GnnDims& dims, std::size_t ues, std::size_t tasks,
                               const AcceleratorConfig& cfg);

// Header: B,phase,bytes,macs,mem_cycles,compute_cycles,phase_cycles,bound,ns
void write_schedule_csv(std::ostream& out, std::span<const ScheduleReport> reports,
                        const AcceleratorConfig& cfg);

}  // namespace fasbeam
