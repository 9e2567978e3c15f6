#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nvholo_cli_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + NVHOLO_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path a = fresh("a"), b = fresh("b");
  for (const char* sub : {"rabi", "angle-sweep", "tolerance", "synthesize S"}) {
    ASSERT_EQ(run("--out " + a.string() + " " + sub), 0) << sub;
    ASSERT_EQ(run("--out " + b.string() + " " + sub), 0) << sub;
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
    ++files;
  }
  EXPECT_GE(files, 8);
}

TEST(Cli, SidecarsCarryProvenanceFields) {
  const fs::path d = fresh("meta");
  ASSERT_EQ(run("--out " + d.string() + " --seed 7 angle-sweep"), 0);
  const auto meta = nlohmann::json::parse(slurp(d / "angle_vs_detuning.meta.json"));
  EXPECT_EQ(meta.at("seed"), 7);
  EXPECT_EQ(meta.at("config_hash").get<std::string>().size(), 16u);
  EXPECT_TRUE(meta.contains("tool_version"));
  EXPECT_TRUE(meta.contains("bloch_convention"));
  std::ifstream csv(d / "angle_vs_detuning.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "detuning_mhz,gamma_rad,t2pi_ns");
}

TEST(Cli, JsonFormatSwitchesTables) {
  const fs::path d = fresh("json");
  ASSERT_EQ(run("--out " + d.string() + " --format json angle-sweep"), 0);
  const auto j = nlohmann::json::parse(slurp(d / "angle_vs_detuning.json"));
  ASSERT_TRUE(j.at("rows").is_array());
  EXPECT_TRUE(j.at("rows").at(0).contains("gamma_rad"));
}

TEST(Cli, ErrorsExitNonZero) {
  const fs::path d = fresh("err");
  EXPECT_NE(run("--out " + d.string() + " synthesize W"), 0);
  EXPECT_NE(run("--out " + d.string() + " --config /nonexistent.json rabi"), 0);
  EXPECT_NE(run("--out " + d.string() + " --format xml rabi"), 0);
}
