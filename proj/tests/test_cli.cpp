#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "expo/io.hpp"
#include "expo/synth.hpp"

using namespace expo;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string log;
};

RunResult run_cli(const std::string& args, const std::string& log_name) {
  auto log = (fs::temp_directory_path() / log_name).string();
  std::string cmd = std::string(EXPO_CLI_PATH) + " " + args + " >" + log + " 2>&1";
  int rc = std::system(cmd.c_str());
  std::ifstream f(log);
  std::string text((std::istreambuf_iterator<char>(f)), {});
  return {WEXITSTATUS(rc), text};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), {});
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PostingRecord fixture_record(const std::string& id, const std::string& occ, int month,
                             double beta) {
  PostingRecord r;
  r.posting_id = id;
  r.occupation = occ;
  r.seniority = Seniority::Intermediate;
  r.industry = "52";
  r.state = "CA";
  r.date = {2021, month, 10};
  r.beta = beta;
  r.alpha = beta;
  r.gamma = beta;
  r.share_e1 = beta;
  r.share_e0 = 1.0 - beta;
  return r;
}

// Exposure fixture reproducing the two-cell hand instance on 2021Q1->Q2.
std::string write_hand_fixture(const fs::path& dir) {
  std::vector<PostingRecord> records;
  auto add = [&](const std::string& occ, int month, int n, double beta) {
    for (int i = 0; i < n; ++i)
      records.push_back(
          fixture_record(occ + "-" + std::to_string(month) + "-" + std::to_string(i), occ,
                         month, beta));
  };
  add("A", 1, 5, 0.4);
  add("B", 1, 5, 0.2);
  add("A", 4, 3, 0.5);
  add("B", 4, 7, 0.1);
  auto path = (dir / "exposure.csv").string();
  io::write_posting_records(path, records);
  return path;
}

std::map<std::string, std::vector<std::string>> load_csv(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string line;
  REQUIRE(std::getline(f, line));
  auto header = io::split_csv_line(line);
  std::map<std::string, std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = io::split_csv_line(line);
    rows[fields[0]] = fields;
  }
  return rows;
}

}  // namespace

TEST_CASE("missing input file exits 2 without partial output") {
  auto dir = fresh_dir("expo-cli-missing");
  auto r = run_cli("exposure --annotations " + (dir / "nope.jsonl").string() + " --out " +
                       (dir / "out").string(),
                   "expo-missing.log");
  CHECK(r.exit_code == 2);
  CHECK(!fs::exists(dir / "out" / "exposure.csv"));
}

TEST_CASE("computational errors exit 1") {
  auto dir = fresh_dir("expo-cli-comp");
  auto exposure = write_hand_fixture(dir);
  // baseline year with no postings: a computational error, not a config one
  auto r = run_cli("decompose --exposure " + exposure + " --baseline 2019 --out " +
                       (dir / "out").string(),
                   "expo-comp.log");
  CHECK(r.exit_code == 1);
}

TEST_CASE("cli reads settings from a config file") {
  auto dir = fresh_dir("expo-cli-conf");
  auto exposure = write_hand_fixture(dir);
  auto conf = (dir / "run.conf").string();
  {
    std::ofstream f(conf);
    f << "exposure_file = " << exposure << "\n"
      << "baseline = 2021Q1\n"
      << "from_period = 2021Q2\n"
      << "out_dir = " << (dir / "out").string() << "\n";
  }
  auto r = run_cli("decompose --config " + conf, "expo-conf.log");
  REQUIRE(r.exit_code == 0);
  auto rows = load_csv((dir / "out" / "decomposition.raw.csv").string());
  REQUIRE(rows.count("2021Q2"));
  CHECK(std::stod(rows.at("2021Q2")[1]) == Catch::Approx(-0.08).margin(1e-14));
}

TEST_CASE("cli decompose reproduces the hand instance") {
  auto dir = fresh_dir("expo-cli-hand");
  auto exposure = write_hand_fixture(dir);
  auto out = (dir / "out").string();
  auto r = run_cli("decompose --exposure " + exposure +
                       " --baseline 2021Q1 --from-period 2021Q2 --out " + out,
                   "expo-hand.log");
  REQUIRE(r.exit_code == 0);

  auto rows = load_csv(out + "/decomposition.raw.csv");
  REQUIRE(rows.count("2021Q2"));
  const auto& row = rows.at("2021Q2");
  // columns: period,total,composition,within,interaction,...
  CHECK(std::stod(row[1]) == Catch::Approx(-0.08).margin(1e-14));
  CHECK(std::stod(row[2]) == Catch::Approx(-0.04).margin(1e-14));
  CHECK(std::stod(row[3]) == Catch::Approx(0.0).margin(1e-14));
  CHECK(std::stod(row[4]) == Catch::Approx(-0.04).margin(1e-14));

  // identity column check: total - (C+W+I) ~ 0 for every period
  for (const auto& [period, fields] : rows)
    CHECK(std::abs(std::stod(fields[1]) -
                   (std::stod(fields[2]) + std::stod(fields[3]) + std::stod(fields[4]))) < 1e-12);

  // display table carries the 4-decimal rendering
  auto display = slurp(out + "/decomposition.csv");
  CHECK(display.find("2021Q2,-0.0800,-0.0400,0.0000,-0.0400") != std::string::npos);

  CHECK(fs::exists(out + "/decomposition.svg"));
  CHECK(fs::exists(out + "/decomposition_sign_patterns.csv"));
  CHECK(fs::exists(out + "/decomposition_counterfactual.csv"));
  CHECK(fs::exists(out + "/contributions.csv"));

  auto contribs = load_csv(out + "/contributions.raw.csv");
  REQUIRE(contribs.count("Overall"));
  CHECK(std::stod(contribs.at("Overall")[1]) == Catch::Approx(50.0).margin(1e-9));
}

TEST_CASE("cli pipeline runs synth to decompose and is rerun-stable") {
  auto dir = fresh_dir("expo-cli-pipe");
  auto out = (dir / "out").string();
  auto r1 = run_cli("synth --out " + out +
                        " --seed 5 --postings-per-period 1500 --periods 6 --sectors 3"
                        " --occupations 3",
                    "expo-pipe1.log");
  REQUIRE(r1.exit_code == 0);
  REQUIRE(fs::exists(out + "/synthetic.csv"));
  REQUIRE(fs::exists(out + "/truth_panel.csv"));

  auto r2 = run_cli("panel --exposure " + out + "/synthetic.csv --out " + out, "expo-pipe2.log");
  REQUIRE(r2.exit_code == 0);
  auto panel1 = slurp(out + "/panel.csv");

  auto r3 = run_cli("decompose --exposure " + out + "/synthetic.csv --out " + out,
                    "expo-pipe3.log");
  REQUIRE(r3.exit_code == 0);
  auto decomp1 = slurp(out + "/decomposition.csv");
  auto svg1 = slurp(out + "/decomposition.svg");

  // byte-identical rerun, svg included
  run_cli("panel --exposure " + out + "/synthetic.csv --out " + out, "expo-pipe4.log");
  run_cli("decompose --exposure " + out + "/synthetic.csv --out " + out, "expo-pipe5.log");
  CHECK(slurp(out + "/panel.csv") == panel1);
  CHECK(slurp(out + "/decomposition.csv") == decomp1);
  CHECK(slurp(out + "/decomposition.svg") == svg1);

  // variants run on the same inputs
  for (const char* variant : {"twofold", "balanced", "within_sector", "by_seniority"}) {
    auto rv = run_cli("decompose --variant " + std::string(variant) + " --exposure " + out +
                          "/synthetic.csv --out " + out,
                      "expo-pipe-variant.log");
    REQUIRE(rv.exit_code == 0);
  }
  CHECK(fs::exists(out + "/twofold.csv"));
  CHECK(fs::exists(out + "/balanced.csv"));
  CHECK(fs::exists(out + "/within_sector.csv"));
  CHECK(fs::exists(out + "/decomposition_junior.csv"));

  // decompose accepts an imported panel: the decomposition terms match the
  // built panel bit-exactly; diagnostics may differ at float noise because
  // period totals are reconstructed from shares
  auto r4 = run_cli("decompose --panel " + out + "/panel.csv --out " + (dir / "out2").string(),
                    "expo-pipe6.log");
  REQUIRE(r4.exit_code == 0);
  auto built = load_csv(out + "/decomposition.raw.csv");
  auto imported = load_csv((dir / "out2").string() + "/decomposition.raw.csv");
  REQUIRE(built.size() == imported.size());
  for (const auto& [period, row] : built) {
    const auto& other = imported.at(period);
    for (int c = 1; c <= 4; ++c) CHECK(row[c] == other[c]);
    for (int c = 5; c <= 8; ++c)
      CHECK(std::stod(row[c]) == Catch::Approx(std::stod(other[c])).margin(1e-12));
  }
}

TEST_CASE("cli by_seniority on a single-seniority fixture equals the plain run") {
  auto dir = fresh_dir("expo-cli-sen");
  auto exposure = write_hand_fixture(dir);  // all Intermediate
  auto out = (dir / "out").string();
  auto r = run_cli("decompose --variant by_seniority --exposure " + exposure +
                       " --baseline 2021Q1 --out " + out,
                   "expo-sen.log");
  REQUIRE(r.exit_code == 0);
  auto plain = load_csv(out + "/decomposition.raw.csv");
  auto filtered = load_csv(out + "/decomposition_intermediate.raw.csv");
  REQUIRE(plain.count("2021Q2"));
  REQUIRE(filtered.count("2021Q2"));
  for (int c = 1; c <= 4; ++c)
    CHECK(std::stod(plain.at("2021Q2")[c]) == std::stod(filtered.at("2021Q2")[c]));
  CHECK(!fs::exists(out + "/decomposition_junior.csv"));  // stratum absent
}

TEST_CASE("cli ob identities") {
  auto dir = fresh_dir("expo-cli-ob");
  auto out = (dir / "out").string();

  // identical pre/post cell tables: explained = unexplained = 0
  {
    std::ofstream cells(dir / "cells_same.csv");
    cells << "occupation,industry,seniority,state,remote,internship,employment_type,group,"
             "weight,outcome\n";
    for (const char* g : {"PreGpt", "PostGpt"}) {
      cells << "occ-a,52,Junior,CA,NotRemote,NonIntern,FullTime," << g << ",2,0.6\n";
      cells << "occ-b,52,Junior,CA,NotRemote,NonIntern,FullTime," << g << ",1,0.3\n";
    }
  }
  auto r1 = run_cli("ob --cells " + (dir / "cells_same.csv").string() + " --out " + out,
                    "expo-ob1.log");
  REQUIRE(r1.exit_code == 0);
  auto summary = load_csv(out + "/ob_summary.raw.csv");
  REQUIRE(summary.count("Overall"));
  CHECK(std::stod(summary.at("Overall")[4]) == Catch::Approx(0.0).margin(1e-12));
  CHECK(std::stod(summary.at("Overall")[5]) == Catch::Approx(0.0).margin(1e-12));

  // only the occupation mix shifts: the occupation block carries all of the
  // explained component and the block table sums to it
  {
    std::ofstream cells(dir / "cells_shift.csv");
    cells << "occupation,industry,seniority,state,remote,internship,employment_type,group,"
             "weight,outcome\n";
    cells << "occ-a,52,Junior,CA,NotRemote,NonIntern,FullTime,PreGpt,3,0.8\n";
    cells << "occ-b,52,Junior,CA,NotRemote,NonIntern,FullTime,PreGpt,1,0.2\n";
    cells << "occ-a,52,Junior,CA,NotRemote,NonIntern,FullTime,PostGpt,1,0.8\n";
    cells << "occ-b,52,Junior,CA,NotRemote,NonIntern,FullTime,PostGpt,3,0.2\n";
  }
  auto r2 = run_cli("ob --cells " + (dir / "cells_shift.csv").string() + " --out " + out,
                    "expo-ob2.log");
  REQUIRE(r2.exit_code == 0);
  auto summary2 = load_csv(out + "/ob_summary.raw.csv");
  double explained = std::stod(summary2.at("Overall")[4]);
  CHECK(explained == Catch::Approx(-0.3).margin(1e-10));  // share shift .75->.25 times gap .6
  CHECK(std::stod(summary2.at("Overall")[5]) == Catch::Approx(0.0).margin(1e-10));
  auto blocks = load_csv(out + "/ob_blocks.raw.csv");
  REQUIRE(blocks.count("occupation"));
  CHECK(std::stod(blocks.at("occupation")[1]) == Catch::Approx(explained).margin(1e-12));
  double block_sum = 0.0;
  for (const auto& [name, fields] : blocks) block_sum += std::stod(fields[1]);
  CHECK(block_sum == Catch::Approx(explained).margin(1e-12));
  CHECK(fs::exists(out + "/ob_blocks.svg"));
}

TEST_CASE("cli describe is deterministic and flat on uniform exposure") {
  auto dir = fresh_dir("expo-cli-desc");
  std::vector<PostingRecord> records;
  for (int i = 0; i < 200; ++i) {
    auto r = fixture_record("u-" + std::to_string(i), "occ-" + std::to_string(i % 7),
                            1 + (i % 12), 0.42);
    r.industry = i % 2 ? "52" : "61";
    records.push_back(r);
  }
  auto exposure = (dir / "exposure.csv").string();
  io::write_posting_records(exposure, records);
  auto out = (dir / "out").string();
  auto r1 = run_cli("describe --exposure " + exposure + " --out " + out, "expo-desc.log");
  REQUIRE(r1.exit_code == 0);

  auto sectors = load_csv(out + "/sector_means.raw.csv");
  REQUIRE(sectors.size() == 2);
  for (const auto& [sector, fields] : sectors)
    CHECK(std::stod(fields[1]) == Catch::Approx(0.42).margin(1e-12));

  auto terciles1 = slurp(out + "/tercile_assignment.csv");
  run_cli("describe --exposure " + exposure + " --out " + out, "expo-desc2.log");
  CHECK(slurp(out + "/tercile_assignment.csv") == terciles1);
  CHECK(fs::exists(out + "/summary_stats.csv"));
  CHECK(fs::exists(out + "/seniority_trends.csv"));
  CHECK(fs::exists(out + "/occupation_terciles.csv"));
  CHECK(fs::exists(out + "/top_bottom_occupations.csv"));
}

TEST_CASE("cli annotate with the mock backend and sidecar-targeted rerun") {
  auto dir = fresh_dir("expo-cli-ann");
  std::vector<io::RawPosting> postings;
  for (int i = 0; i < 50; ++i) {
    io::RawPosting p;
    p.input.posting_id = "job-" + std::to_string(i);
    p.input.title = "Coordinator";
    p.input.body = "Plan weekly schedules for the region. Update tracking sheets. "
                   "Call vendors about late deliveries. Prepare status summaries.";
    p.input.specialized_skills = {"Scheduling"};
    p.input.common_skills = {"Communication"};
    p.record = PostingRecord{};
    p.record.posting_id = p.input.posting_id;
    p.record.date = {2021, 1 + (i % 12), 5};
    p.record.occupation = "occ-" + std::to_string(i % 5);
    p.record.industry = "52";
    postings.push_back(p);
  }
  auto postings_path = (dir / "postings.jsonl").string();
  io::write_postings_jsonl(postings_path, postings);

  auto ann = (dir / "annotations.jsonl").string();
  auto r1 = run_cli("annotate --postings " + postings_path + " --annotations " + ann,
                    "expo-ann1.log");
  REQUIRE(r1.exit_code == 0);
  auto first = slurp(ann);
  CHECK(std::count(first.begin(), first.end(), '\n') == 50);
  CHECK(!fs::exists(ann + ".failures.jsonl"));

  // simulate a failed posting: strip one record, write the sidecar, rerun
  {
    auto records = io::read_annotations(ann);
    io::AnnotationWriter w(ann);
    for (const auto& rec : records)
      if (rec.posting_id != "job-17") w.write(rec.posting_id, rec.tasks);
    io::write_failures(ann + ".failures.jsonl",
                       {{"job-17", 1, "BackendUnavailable", "synthetic", 3}});
  }
  auto r2 = run_cli("annotate --postings " + postings_path + " --annotations " + ann,
                    "expo-ann2.log");
  REQUIRE(r2.exit_code == 0);
  CHECK(r2.log.find("rerun: 1 postings") != std::string::npos);
  CHECK(slurp(ann) == first);  // merged rerun reproduces the original bytes
  CHECK(!fs::exists(ann + ".failures.jsonl"));

  // exposure over the worked example emits the published index value
  {
    std::vector<TaskAnnotation> tasks;
    auto add = [&](const char* id, SkillKind kind, ExposureLabel label) {
      TaskAnnotation t;
      t.task_id = id;
      t.text = "task";
      t.skill.group_id = kind == SkillKind::Specialized ? "S1" : "C1";
      t.skill.kind = kind;
      t.raw_weight = raw_weight_for(kind);
      t.label = label;
      tasks.push_back(t);
    };
    add("t1", SkillKind::Specialized, ExposureLabel::E1);
    add("t2", SkillKind::Specialized, ExposureLabel::E2);
    add("t3", SkillKind::Specialized, ExposureLabel::E1);
    add("t4", SkillKind::Specialized, ExposureLabel::E1);
    add("t5", SkillKind::Specialized, ExposureLabel::E1);
    add("t6", SkillKind::Common, ExposureLabel::E1);
    add("t7", SkillKind::Specialized, ExposureLabel::E2);
    add("t8", SkillKind::Specialized, ExposureLabel::E1);
    io::AnnotationWriter w((dir / "worked.jsonl").string());
    w.write("worked-1", tasks);
    std::vector<TaskAnnotation> unexposed(tasks.begin(), tasks.begin() + 4);
    for (auto& t : unexposed) t.label = ExposureLabel::E0;
    w.write("worked-2", unexposed);
  }
  auto r3 = run_cli("exposure --annotations " + (dir / "worked.jsonl").string() + " --out " +
                        (dir / "out").string(),
                    "expo-ann3.log");
  REQUIRE(r3.exit_code == 0);
  auto csv = slurp((dir / "out" / "exposure.csv").string());
  CHECK(csv.find("0.0000,0.7333,0.2667,0.7333,0.8667,1.0000") != std::string::npos);
  // the fully unexposed posting carries zero in every index
  CHECK(csv.find("1.0000,0.0000,0.0000,0.0000,0.0000,0.0000") != std::string::npos);

  // the exposure file's mean index equals a brute-force mean over annotations
  auto r4 = run_cli("exposure --annotations " + ann + " --postings " + postings_path +
                        " --exposure " + (dir / "full.csv").string(),
                    "expo-ann4.log");
  REQUIRE(r4.exit_code == 0);
  KahanSum brute;
  long n_brute = 0;
  for (const auto& rec : io::read_annotations(ann)) {
    brute.add(compute_exposure(rec.posting_id, rec.tasks).beta);
    ++n_brute;
  }
  KahanSum file_mean;
  long n_file = 0;
  io::for_each_posting_record((dir / "full.csv").string(), [&](const PostingRecord& r) {
    file_mean.add(r.beta);
    ++n_file;
  });
  REQUIRE(n_file == n_brute);
  CHECK(std::abs(file_mean.value() / n_file - brute.value() / n_brute) < 1e-12);
}

TEST_CASE("cli ob builds cells from exposure records with a cut date") {
  auto dir = fresh_dir("expo-cli-ob-records");
  auto out = (dir / "out").string();
  auto r1 = run_cli("synth --out " + dir.string() +
                        " --seed 40 --postings-per-period 4000 --periods 8 --sectors 3"
                        " --occupations 3 --seniorities 3",
                    "expo-obr1.log");
  REQUIRE(r1.exit_code == 0);
  auto r2 = run_cli("ob --exposure " + (dir / "synthetic.csv").string() +
                        " --cut-date 2022-07-01 --out " + out,
                    "expo-obr2.log");
  REQUIRE(r2.exit_code == 0);
  auto summary = load_csv(out + "/ob_summary.raw.csv");
  REQUIRE(summary.count("Overall"));
  const auto& row = summary.at("Overall");
  // difference column equals explained + unexplained
  CHECK(std::stod(row[3]) ==
        Catch::Approx(std::stod(row[4]) + std::stod(row[5])).margin(1e-10));
  // per-seniority rows ride along
  CHECK(summary.count("Junior"));
  CHECK(summary.count("Senior"));
}
