#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "lcf/corpus.hpp"
#include "lcf/io.hpp"

using namespace lcf;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path("cli_work");

int run(const std::string& args) {
    fs::create_directories(kWork);
    const std::string cmd = std::string(LCF_CLI_PATH) + " " + args + " > " + (kWork / "stdout.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string path(const std::string& name) { return (kWork / name).string(); }

void write_text(const std::string& name, const std::string& text) {
    fs::create_directories(kWork);
    std::ofstream(kWork / name) << text;
}

}  // namespace

TEST_CASE("steiner transform leaves a centered gaussian unchanged") {
    fs::create_directories(kWork);
    const auto f = sample(Expression::standard_gaussian(2), GridSpec::cube(2, -8, 8, 65));
    save_grid_function(path("gauss.grid"), f);
    CHECK(run("transform " + path("gauss.grid") + " -o " + path("gauss_s.grid") + " --op steiner --axis 0 --offset 0") == 0);
    CHECK(slurp(path("gauss_s.grid")) == slurp(path("gauss.grid")));
}

TEST_CASE("polar transform of the 2-D gaussian has mass 2 pi") {
    fs::create_directories(kWork);
    const auto f = sample(Expression::standard_gaussian(2), GridSpec::cube(2, -16, 16, 257));
    save_grid_function(path("gauss2.grid"), f);
    CHECK(run("transform " + path("gauss2.grid") + " -o " + path("polar.grid") + " --op polar --z 0,0") == 0);
    const auto out = std::get<LogConcaveFnGrid>(load_grid_function(path("polar.grid"), {1e-9, 1e-6, false, false}));
    CHECK(integrate(out) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-4));
}

TEST_CASE("conjugate transform of an indicator gives |y|") {
    std::ostringstream text;
    text << "# lcf grid v1\ndim 1\naxis 0 -2 2 41\nkind convex-extended\nvalues\n";
    const GridSpec g = GridSpec::cube(1, -2, 2, 41);
    for (std::size_t i = 0; i < g.size(); ++i) text << (std::fabs(g.coord(0, i)) <= 1.0 ? "0" : "inf") << '\n';
    write_text("indicator.grid", text.str());
    CHECK(run("transform " + path("indicator.grid") + " -o " + path("abs.grid") + " --op conjugate") == 0);
    const auto out = std::get<ConvexFnGrid>(load_grid_function(path("abs.grid")));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(out[i].value() == std::fabs(g.coord(0, i)));
}

TEST_CASE("theorem1 suite passes at seed 7") {
    CHECK(run("verify --suite theorem1 --seed 7 --out-dir " + path("report1")) == 0);
    CHECK(fs::exists(kWork / "report1" / "theorem1.csv"));
    CHECK(fs::exists(kWork / "report1" / "theorem1.json"));
}

TEST_CASE("counterexample fixture fails the ball inequality") {
    const int code = run("verify --suite lemma21 --fixture counterexample --out-dir " + path("report2"));
    CHECK(code == 1);
    CHECK(slurp(kWork / "stdout.txt").find("HypothesisFailed") != std::string::npos);
}

TEST_CASE("corpus generation is byte-identical across runs") {
    CHECK(run("corpus --family gaussian --count 3 --seed 7 --out-dir " + path("c1")) == 0);
    CHECK(run("corpus --family gaussian --count 3 --seed 7 --out-dir " + path("c2")) == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(kWork / "c1")) {
        ++files;
        CHECK(slurp(e.path()) == slurp(kWork / "c2" / e.path().filename()));
    }
    CHECK(files == 4);
}

TEST_CASE("usage and parse errors exit with 2") {
    CHECK(run("transform") == 2);
    CHECK(run("verify --suite nonsense") == 2);
    write_text("broken.grid", "# lcf grid v1\ndim 1\naxis 0 -1 1 3\nkind logconcave\nvalues\n1\nx\n1\n");
    CHECK(run("transform " + path("broken.grid") + " -o " + path("never.grid") + " --op steiner") == 2);
    CHECK(slurp(kWork / "stdout.txt").find("line 7") != std::string::npos);
}

TEST_CASE("numeric aborts exit with 3") {
    write_text("huge.grid", "# lcf grid v1\ndim 1\naxis 0 -1 1 5\nkind logconcave\nvalues\n0\n1e308\n1e308\n1e308\n0\n");
    CHECK(run("transform " + path("huge.grid") + " -o " + path("never.grid") + " --op steiner") == 3);
}
