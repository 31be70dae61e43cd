#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "fixtures.hpp"

using json = nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome cli(const std::string& args) {
    static fixtures::TempDir scratch;
    const auto out = scratch.path() / "stdout.txt";
    const auto err = scratch.path() / "stderr.txt";
    const std::string cmd = std::string("'") + MLAUDIT_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                            err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    o.out = fixtures::read_file(out);
    o.err = fixtures::read_file(err);
    return o;
}

std::string data_flag() { return " --data-dir '" + fixtures::data_dir().string() + "'"; }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2") {
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("health").code == 2);
    CHECK(cli("health --dataset concrete.csv --format xml" + data_flag()).code == 2);
    CHECK(cli("formula eval nope" + data_flag()).code == 2);
    const auto dom = cli("formula eval sr_mix_age coarse_agg=1000 wc=1 age=28 sp=0 slag=0" + data_flag());
    CHECK(dom.code == 2);
    CHECK(dom.err.find("domain error") != std::string::npos);
}

TEST_CASE("version and formulas") {
    const auto v = cli("--version");
    CHECK(v.code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);
    const auto f = cli("formula eval sr_wc wc=1" + data_flag());
    REQUIRE(f.code == 0);
    CHECK(json::parse(f.out).at("report").at("value").get<double>() == doctest::Approx(13.64 / 1.36));
    const auto list = cli("formula list --format tables" + data_flag());
    CHECK(list.code == 0);
    CHECK(list.out.find("asce29") != std::string::npos);
}

TEST_CASE("data errors exit 3") {
    CHECK(cli("health --dataset missing.csv" + data_flag()).code == 3);
    const auto wrong_target = cli("health --dataset concrete.csv --param target=age" + data_flag());
    CHECK(wrong_target.code == 3);
    CHECK(wrong_target.err.find("schema error") != std::string::npos);
    fixtures::TempDir tmp;
    const auto bad = tmp.write("concrete.csv", fixtures::read_file(fixtures::data_dir() / "concrete.csv") + "1,2,x\n");
    CHECK(cli("health --dataset '" + bad.string() + "' --schema concrete" + data_flag()).code == 3);
}

TEST_CASE("paradox exits 4 and the exhaustive catalog clears it") {
    const auto p = cli("optimize --budget 3000" + data_flag());
    CHECK(p.code == 4);
    CHECK(json::parse(p.out).at("status") == "paradox-detected");
    const auto ok = cli("optimize --budget 3000 --catalog exhaustive" + data_flag());
    CHECK(ok.code == 0);
    CHECK(json::parse(ok.out).at("status") == "ok");
}

TEST_CASE("output directory and replay") {
    fixtures::TempDir tmp;
    const auto dir = tmp.path() / "run";
    const auto r = cli("eval --dataset concrete.csv --model forest --hyper n_trees=5 -k 3 --seed 9 --format none -o '" +
                       dir.string() + "'" + data_flag());
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto report = fixtures::read_file(dir / "report.json");
    const auto manifest = json::parse(fixtures::read_file(dir / "manifest.json"));
    CHECK(manifest.at("seed") == 9);
    CHECK(manifest.at("command") == "eval");
    CHECK_FALSE(fixtures::read_file(dir / "tables" / "folds.csv").empty());

    const auto rep = cli("replay '" + (dir / "manifest.json").string() + "' --verify '" + (dir / "report.json").string() +
                         "' --format none");
    CHECK(rep.code == 0);
    CHECK(rep.err.find("identical") != std::string::npos);

    const auto tampered = tmp.write("report.json", report + " ");
    CHECK(cli("replay '" + (dir / "manifest.json").string() + "' --verify '" + tampered.string() + "' --format none")
              .code == 1);
}

TEST_CASE("config file") {
    fixtures::TempDir tmp;
    const auto ini = tmp.write("run.ini", "[optimize]\nbudget = 2000\ncatalog = exhaustive\n");
    const auto r = cli("--config '" + ini.string() + "' optimize" + data_flag());
    CHECK(r.code == 0);
    CHECK(json::parse(r.out).at("manifest").at("params").at("budget") == 2000);
    CHECK(cli("--config '" + ini.string() + "' optimize --catalog catalog/chs_sections.csv" + data_flag()).code == 4);
}

}
