#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "mdmt/errors.hpp"
#include "mdmt/metrics.hpp"

using namespace mdmt;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("perfect scores give perfect averages and no forgetting") {
  Mat m = Mat::Ones(4, 4);
  CHECK(average_accuracy(m, 4) == doctest::Approx(1.0));
  CHECK(forgetting(m, 4) == doctest::Approx(0.0));
  CHECK(ltr(m) == doctest::Approx(0.0));
  Mat curve = Mat::Ones(4, 11);
  CHECK(lca(curve) == doctest::Approx(1.0));
}

TEST_CASE("a two task drop is measured by every metric") {
  Mat m(2, 2);
  m << 0.9, 0.0, 0.8, 0.9;
  CHECK(average_accuracy(m, 1) == doctest::Approx(0.9));
  CHECK(average_accuracy(m, 2) == doctest::Approx(0.85));
  CHECK(forgetting(m, 2) == doctest::Approx(0.1));
  CHECK(ltr(m) == doctest::Approx(0.1));
}

TEST_CASE("improvement on old tasks never counts toward the ranking loss") {
  Mat m(2, 2);
  m << 0.6, 0.0, 0.9, 0.8;
  CHECK(ltr(m) == doctest::Approx(0.0));
  CHECK(forgetting(m, 2) == doctest::Approx(-0.3));
  CHECK(std::signbit(ltr(m)) == false);
}

TEST_CASE("forgetting takes the best earlier accuracy per task") {
  Mat m(3, 3);
  m << 0.5, 0.0, 0.0,
       0.9, 0.7, 0.0,
       0.6, 0.6, 0.8;
  // task 1: best of rows 1..2 is 0.9, final 0.6; task 2: best 0.7, final 0.6
  CHECK(forgetting(m, 3) == doctest::Approx((0.3 + 0.1) / 2.0));
  // drops weighted by how long ago the task was learned
  CHECK(ltr(m) == doctest::Approx((2.0 * 0.0 + 1.0 * 0.1) / 2.0));
}

TEST_CASE("learning curve area averages the early batch accuracies") {
  Mat bshot(2, 3);
  bshot << 0.1, 0.5, 0.9, 0.3, 0.6, 0.9;
  CHECK(lca(bshot) == doctest::Approx((0.2 + 0.55 + 0.9) / 3.0));
}

TEST_CASE("metric preconditions are enforced") {
  Mat m = Mat::Ones(3, 3);
  CHECK_THROWS_AS(average_accuracy(m, 0), ConfigError);
  CHECK_THROWS_AS(average_accuracy(m, 4), ConfigError);
  CHECK_THROWS_AS(forgetting(m, 1), ConfigError);
  CHECK_THROWS_AS(ltr(Mat::Ones(1, 1)), ConfigError);
  CHECK_THROWS_AS(average_accuracy(Mat::Ones(2, 3), 2), ShapeError);
}

TEST_CASE("published accuracy records reproduce the reported metrics") {
  struct Expected {
    const char* file;
    double a, f, l;
  };
  const Expected table[] = {
      {"permuted_mnist_mdmtr.txt", 0.9433294118, 0.0227687500, 0.2477812500},
      {"permuted_mnist_mega.txt", 0.9120941176, 0.0491187500, 0.5248312500},
      {"permuted_mnist_agem.txt", 0.8932294118, 0.0689437500, 0.7164375000},
      {"split_cifar_mdmtr.txt", 0.6943294118, 0.0293500000, 0.2165500000},
      {"split_cifar_mega.txt", 0.6612470588, 0.0401750000, 0.2788000000},
      {"split_cifar_agem.txt", 0.6128000000, 0.0784500000, 0.6221000000},
  };
  for (const Expected& e : table) {
    Mat m = parse_matrix(read_file(fixture(e.file)));
    REQUIRE(m.rows() == 17);
    REQUIRE(m.cols() == 17);
    CHECK(average_accuracy(m, 17) == doctest::Approx(e.a).epsilon(1e-9));
    CHECK(forgetting(m, 17) == doctest::Approx(e.f).epsilon(1e-9));
    CHECK(ltr(m) == doctest::Approx(e.l).epsilon(1e-9));
  }
}

TEST_CASE("parser accepts triangles, padded squares, and comma separators") {
  Mat tri = parse_matrix("1.0\n0.5 1.0\n");
  CHECK(tri.rows() == 2);
  CHECK(tri(0, 0) == 1.0);
  CHECK(tri(0, 1) == 0.0);
  CHECK(tri(1, 0) == 0.5);

  Mat padded = parse_matrix("1.0 0.0\n0.5 1.0\n");
  CHECK((tri - padded).cwiseAbs().maxCoeff() == 0.0);

  Mat commas = parse_matrix("1.0,0.0\n0.5,1.0\n");
  CHECK((tri - commas).cwiseAbs().maxCoeff() == 0.0);

  Mat mixed = parse_matrix("\n1.0\n\n0.5, 1.0\n\n");
  CHECK((tri - mixed).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parser reports the offending line") {
  CHECK_THROWS_WITH_AS(parse_matrix("0.5\n0.4 0.5\n0.3 0.2\n"),
                       doctest::Contains("line 3"), ParseError);
  CHECK_THROWS_WITH_AS(parse_matrix("0.5\nabc 0.5\n"),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(parse_matrix("0.5\n0.4 1.5\n"),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(parse_matrix("0.5\n-0.1 0.5\n"),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(parse_matrix(""), doctest::Contains("line 1"), ParseError);
  CHECK_THROWS_WITH_AS(parse_matrix("0.5 0.5 0.5\n0.1 0.2 0.3\n"),
                       doctest::Contains("line 1"), ParseError);
  // blank lines shift the reported number, not the parse
  CHECK_THROWS_WITH_AS(parse_matrix("0.5\n\n\n0.4 0.5 0.6 0.7\n"),
                       doctest::Contains("line 4"), ParseError);
}

TEST_CASE("emit then parse is lossless at four decimals") {
  const char* files[] = {"permuted_mnist_mdmtr.txt", "permuted_mnist_mega.txt",
                         "permuted_mnist_agem.txt", "split_cifar_mdmtr.txt",
                         "split_cifar_mega.txt", "split_cifar_agem.txt"};
  for (const char* name : files) {
    Mat m = parse_matrix(read_file(fixture(name)));
    Mat again = parse_matrix(emit_matrix(m));
    CHECK((m - again).cwiseAbs().maxCoeff() == 0.0);
  }

  Mat tiny(2, 2);
  tiny << 0.12345, 0.0, 0.9, 1.0;
  Mat round = parse_matrix(emit_matrix(tiny));
  // four decimals survive, the fifth is rounded away
  CHECK(round(0, 0) != tiny(0, 0));
  CHECK(std::abs(round(0, 0) - tiny(0, 0)) < 5e-5);
  CHECK((parse_matrix(emit_matrix(round)) - round).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("emitted text is comma separated with four decimals") {
  Mat m(2, 2);
  m << 1.0, 0.0, 0.25, 0.5;
  CHECK(emit_matrix(m) == "1.0000,0.0000\n0.2500,0.5000\n");
}
