#include <gtest/gtest.h>

#include <sstream>

#include "fasbeam/errors.hpp"
#include "fasbeam/sched.hpp"

using namespace fasbeam;

namespace {

const GnnDims kPaper = GnnDims::paper(4);

std::uint64_t total(const GnnDims& d, std::size_t K, std::size_t B, const AcceleratorConfig& c) {
  return simulate(emit_instructions(d, K, B, c), c).total_cycles;
}

}  // namespace

TEST(Emit, WeightBytesForPaperDims) {
  const auto s = emit_instructions(kPaper, 4, 1, AcceleratorConfig{});
  EXPECT_EQ(s.weight_load_bytes(), 3158016u + 5640u);
}

TEST(Emit, WeightTrafficIndependentOfTasks) {
  const AcceleratorConfig c;
  const auto one = emit_instructions(kPaper, 4, 1, c);
  for (std::size_t B : {2u, 4u, 16u})
    EXPECT_EQ(emit_instructions(kPaper, 4, B, c).weight_load_bytes(), one.weight_load_bytes());
  EXPECT_EQ(emit_instructions_sequential(kPaper, 4, 3, c).weight_load_bytes(),
            3 * one.weight_load_bytes());
}

TEST(Emit, MacsScaleLinearlyInTasks) {
  const AcceleratorConfig c;
  const auto one = emit_instructions(kPaper, 3, 1, c);
  const auto five = emit_instructions(kPaper, 3, 5, c);
  std::vector<std::uint64_t> a, b;
  for (const auto& in : one.instructions)
    if (in.cls == InstrClass::kMatrixProcessing) a.push_back(in.macs);
  for (const auto& in : five.instructions)
    if (in.cls == InstrClass::kMatrixProcessing) b.push_back(in.macs);
  ASSERT_EQ(a.size(), 11u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GT(a[i], 0u);
    EXPECT_EQ(b[i], 5 * a[i]);
  }
}

TEST(Emit, InstructionInvariants) {
  const auto s = emit_instructions(kPaper, 4, 2, AcceleratorConfig{});
  for (const auto& in : s.instructions) {
    if (in.cls == InstrClass::kMatrixProcessing) EXPECT_GT(in.macs, 0u);
    if (in.cls == InstrClass::kMemoryAccess) EXPECT_GT(in.bytes, 0u);
  }
  EXPECT_EQ(s.instructions.back().phase, "writeback");
  EXPECT_THROW(emit_instructions(kPaper, 4, 0, AcceleratorConfig{}), InputError);
}

TEST(Emit, SpillWhenBufferTooSmall) {
  AcceleratorConfig c;
  const auto big = emit_instructions(kPaper, 4, 16, c);
  EXPECT_FALSE(big.spill);
  c.onchip_buffer_bytes = big.peak_activation_bytes - 1;
  const auto spilled = emit_instructions(kPaper, 4, 16, c);
  EXPECT_TRUE(spilled.spill);
  std::uint64_t spill_bytes = 0;
  for (const auto& in : spilled.instructions)
    if (in.spill) spill_bytes += in.bytes;
  EXPECT_GE(spill_bytes, 2u);
  EXPECT_GT(spilled.offchip_bytes(), big.offchip_bytes());
  EXPECT_FALSE(emit_instructions(kPaper, 4, 1, c).spill);
}

TEST(Simulate, CalibratedSingleTask) {
  AcceleratorConfig c;
  c.macs_per_cycle = 1e9;
  const auto r = simulate(emit_instructions(kPaper, 4, 1, c), c);
  EXPECT_NEAR(static_cast<double>(r.total_cycles), 392636.0, 0.05 * 392636.0);
  EXPECT_EQ(r.bound, Bound::kMemory);
  EXPECT_DOUBLE_EQ(r.total_ns, 10.0 * static_cast<double>(r.total_cycles));
  EXPECT_LE(static_cast<double>(total(kPaper, 4, 4, c)), 1.03 * static_cast<double>(r.total_cycles));
}

TEST(Simulate, EmptyStreamIsFree) {
  const AcceleratorConfig c;
  const auto r = simulate(InstructionStream{}, c);
  EXPECT_EQ(r.total_cycles, 0u);
  EXPECT_TRUE(r.phases.empty());
}

TEST(Simulate, PhaseArithmetic) {
  AcceleratorConfig c;
  c.macs_per_cycle = 10;
  c.phase_overhead_cycles = 3;
  InstructionStream s;
  s.instructions.push_back({InstrClass::kMemoryAccess, "a", 81, 0, 0});
  s.instructions.push_back({InstrClass::kMatrixProcessing, "a", 0, 95, 0});
  s.instructions.push_back({InstrClass::kMatrixProcessing, "b", 0, 201, 0});
  const auto r = simulate(s, c);
  ASSERT_EQ(r.phases.size(), 2u);
  EXPECT_EQ(r.phases[0].memory_cycles, 11u);
  EXPECT_EQ(r.phases[0].compute_cycles, 10u);
  EXPECT_EQ(r.phases[0].cycles, 14u);
  EXPECT_EQ(r.phases[1].compute_cycles, 21u);
  EXPECT_EQ(r.phases[1].bound, Bound::kCompute);
  EXPECT_EQ(r.total_cycles, 14u + 24u);
  EXPECT_EQ(r.bound, Bound::kCompute);
  EXPECT_GE(r.total_cycles, std::max(r.memory_cycles, r.compute_cycles));
}

TEST(Simulate, Monotonicity) {
  AcceleratorConfig c;
  std::uint64_t prev = 0;
  for (std::size_t B = 1; B <= 32; B *= 2) {
    const auto t = total(kPaper, 4, B, c);
    EXPECT_GE(t, prev);
    prev = t;
  }
  AcceleratorConfig wide = c;
  wide.offchip_bus_bits = 128;
  EXPECT_LT(total(kPaper, 4, 4, wide), total(kPaper, 4, 4, c));
  AcceleratorConfig slow = c;
  slow.macs_per_cycle = 16;
  EXPECT_GT(total(kPaper, 4, 4, slow), total(kPaper, 4, 4, c));
}

TEST(Sweep, BoundFlipsAtFiveWhenBalancedAtFour) {
  AcceleratorConfig c;
  c.macs_per_cycle = balanced_macs_per_cycle(kPaper, 4, 4, c);
  const std::size_t tasks[] = {1, 2, 3, 4, 5, 6, 8};
  const auto s = sweep_tasks(kPaper, 4, c, tasks);
  ASSERT_TRUE(s.flip_at);
  EXPECT_EQ(*s.flip_at, 5u);
  EXPECT_EQ(s.reports[3].bound, Bound::kMemory);
  EXPECT_EQ(s.reports[4].bound, Bound::kCompute);
}

TEST(Sweep, CsvLayout) {
  const AcceleratorConfig c;
  const std::size_t tasks[] = {1, 2};
  const auto s = sweep_tasks(kPaper, 4, c, tasks);
  std::ostringstream out;
  write_schedule_csv(out, s.reports, c);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "B,phase,bytes,macs,mem_cycles,compute_cycles,phase_cycles,bound,ns");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2 * (s.reports[0].phases.size() + 1));
  EXPECT_THROW(sweep_tasks(kPaper, 4, c, {}), InputError);
}

TEST(Accelerator, RejectsInvalid) {
  AcceleratorConfig c;
  c.offchip_bus_bits = 12;
  EXPECT_THROW(c.validate(), ConfigError);
  c = AcceleratorConfig{};
  c.macs_per_cycle = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}
