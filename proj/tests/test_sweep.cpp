#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "magnomech/sweep.hpp"
#include "oracles.hpp"

using namespace magnomech;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

MeasureSelection only_e() {
  MeasureSelection sel;
  sel.steering = sel.steering_asymmetry = sel.discord = false;
  return sel;
}

}  // namespace

TEST(SweepAxis, ParsesSpec) {
  const SweepAxis a = SweepAxis::parse("tau:0:1:11");
  EXPECT_EQ(a.name, "tau");
  EXPECT_EQ(a.fields, std::vector<std::string>{"tau"});
  EXPECT_EQ(a.count, 11);
  EXPECT_DOUBLE_EQ(a.value(3), 0.3);
  EXPECT_EQ(a.value(10), 1.0);
  EXPECT_EQ(SweepAxis::parse(a.spec()), a);
}

TEST(SweepAxis, JoinedFieldsMoveTogether) {
  const SweepAxis a = SweepAxis::parse("delta_c_omega_d_units+delta_m2_omega_d_units:-2:0:5");
  SystemParams p;
  a.apply(p, -0.5);
  EXPECT_EQ(p.delta_c.value, -0.5);
  EXPECT_EQ(p.delta_m2.value, -0.5);
}

TEST(SweepAxis, RejectsBadSpecs) {
  for (const char* spec : {"no_such_field:0:1:3", "tau:0:1:1", "tau:1:1:3", "tau:0:1", "tau:a:1:3", "tau:0:1:3.5"}) {
    try {
      SweepAxis::parse(spec);
      ADD_FAILURE() << spec;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::BadAxis) << spec;
    }
  }
}

TEST(SweepAxis, DriveFieldsNeedDerivationMode) {
  SystemParams p;
  EXPECT_THROW(SweepAxis::parse("rabi_hz:1:2:3").apply(p, 1.5), Error);
}

TEST(RunSweep, RowCountAndOrder) {
  const std::vector<SweepAxis> axes{SweepAxis::parse("tau:0:0.2:3"), SweepAxis::parse("temperature_k:0:0.1:4")};
  const SweepTable t = run_sweep(oracle::reference_params(), axes, only_e(), 1);
  ASSERT_EQ(t.rows.size(), 12u);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) {
      EXPECT_DOUBLE_EQ(t.rows[4 * i + j].coords[0], axes[0].value(i));
      EXPECT_DOUBLE_EQ(t.rows[4 * i + j].coords[1], axes[1].value(j));
    }
}

TEST(RunSweep, SinglePointEqualsDirectEvaluation) {
  SystemParams p = oracle::reference_params(0.2);
  MeasureSelection sel;
  sel.residual_contangle = true;
  sel.triples = {ModeTriple{}};
  const SweepTable t = run_sweep(p, {SweepAxis::parse("tau:0.2:0.3:2")}, sel, 1);
  const CorrelationReport direct = evaluate(p, sel);
  const CorrelationReport& row = t.rows[0].report;
  EXPECT_EQ(row.stable, direct.stable);
  EXPECT_EQ(row.max_real_part, direct.max_real_part);
  EXPECT_EQ(row.pairs[0].e_n, direct.pairs[0].e_n);
  EXPECT_EQ(row.pairs[0].s_ab, direct.pairs[0].s_ab);
  EXPECT_EQ(row.pairs[0].d_g, direct.pairs[0].d_g);
  EXPECT_EQ(row.triples[0].r_min, direct.triples[0].r_min);
}

TEST(RunSweep, UnstablePointsAreNullRows) {
  const SweepTable t = run_sweep(oracle::reference_params(), {SweepAxis::parse("tau:0.4:0.6:3")}, only_e(), 1);
  EXPECT_TRUE(t.rows[0].report.stable);
  EXPECT_FALSE(t.rows[2].report.stable);
  EXPECT_FALSE(t.rows[2].report.pairs[0].e_n.has_value());
  std::ostringstream csv;
  write_csv(t, csv);
  EXPECT_NE(csv.str().find(",0,"), std::string::npos);
  EXPECT_EQ(csv.str().back(), '\n');
}

TEST(RunSweep, RejectsEmptySelectionAndTooManyAxes) {
  MeasureSelection none = only_e();
  none.log_negativity = false;
  EXPECT_THROW(run_sweep(SystemParams{}, {SweepAxis::parse("tau:0:1:2")}, none), Error);
  const SweepAxis a = SweepAxis::parse("tau:0:0.1:2");
  EXPECT_THROW(run_sweep(SystemParams{}, {a, a, a}, only_e()), Error);
}

TEST(RunSweep, DeterministicAcrossWorkerCounts) {
  const std::vector<SweepAxis> axes{SweepAxis::parse("tau:0:0.5:6"), SweepAxis::parse("temperature_k:0:0.3:7")};
  MeasureSelection sel;
  sel.residual_contangle = true;
  sel.triples = {ModeTriple{}};
  std::ostringstream a, b, c;
  write_csv(run_sweep(oracle::reference_params(), axes, sel, 1), a);
  write_csv(run_sweep(oracle::reference_params(), axes, sel, 3), b);
  write_csv(run_sweep(oracle::reference_params(), axes, sel, 8), c);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), c.str());
}

TEST(WriteTable, TwoByTwoCsvHasFiveLines) {
  const std::vector<SweepAxis> axes{SweepAxis::parse("tau:0:0.2:2"), SweepAxis::parse("temperature_k:0:0.1:2")};
  const SweepTable t = run_sweep(oracle::reference_params(), axes, only_e(), 1);
  std::ostringstream csv;
  write_csv(t, csv);
  EXPECT_EQ(count_lines(csv.str()), 5);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "tau,temperature_k,stable,max_real_part,E_M1M2");
}

TEST(WriteTable, ByteIdenticalRewrites) {
  const SweepTable t =
      run_sweep(oracle::reference_params(), {SweepAxis::parse("temperature_k:0:0.2:9")}, MeasureSelection{}, 2);
  const std::string dir = ::testing::TempDir();
  for (auto fmt : {TableFormat::Csv, TableFormat::Json}) {
    write_table(t, fmt, dir + "mm_a.out");
    write_table(t, fmt, dir + "mm_b.out");
    EXPECT_EQ(slurp(dir + "mm_a.out"), slurp(dir + "mm_b.out"));
  }
  std::remove((dir + "mm_a.out").c_str());
  std::remove((dir + "mm_b.out").c_str());
}

TEST(WriteTable, JsonSchema) {
  const SweepTable t =
      run_sweep(oracle::reference_params(), {SweepAxis::parse("tau:0.45:0.55:3")}, MeasureSelection{}, 1);
  const nlohmann::json j = table_to_json(t);
  ASSERT_TRUE(j.contains("meta") && j.contains("axes") && j.contains("rows"));
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["axes"][0]["name"], "tau");
  EXPECT_TRUE(j["rows"][0]["values"]["E_M1M2"].is_number());
  EXPECT_TRUE(j["rows"][2]["values"]["E_M1M2"].is_null());
  EXPECT_FALSE(j["rows"][2]["stable"].get<bool>());
}

TEST(WriteTable, CsvAndJsonAgree) {
  const SweepTable t =
      run_sweep(oracle::reference_params(), {SweepAxis::parse("temperature_k:0:0.2:5")}, MeasureSelection{}, 1);
  const nlohmann::json j = table_to_json(t);
  const auto e = t.column("E_M1M2");
  for (std::size_t i = 0; i < e.size(); ++i)
    EXPECT_EQ(format_sig9(j["rows"][i]["values"]["E_M1M2"].get<double>()), format_sig9(*e[i]));
}

TEST(WriteTable, UnwritablePathIsIoError) {
  const SweepTable t = run_sweep(oracle::reference_params(), {SweepAxis::parse("tau:0:0.1:2")}, only_e(), 1);
  try {
    write_table(t, TableFormat::Csv, "/nonexistent-dir/x.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}

TEST(Format, NineSignificantDigits) {
  EXPECT_EQ(format_sig9(0.1234567891234), "0.123456789");
  EXPECT_EQ(format_sig9(0.0), "0");
  EXPECT_EQ(format_sig9(-2.5e-7), "-2.5e-07");
}
