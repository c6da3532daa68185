#include <doctest.h>

#include <cstdio>
#include <string>

#include "../oracles.hpp"
#include "underreport/csv.hpp"

using namespace underreport;

namespace {

bool mentions(const CsvError& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

#define CHECK_CSV_ERROR(expr, needle)                  \
  do {                                                 \
    try {                                              \
      (void)(expr);                                    \
      FAIL("expected CsvError from " #expr);           \
    } catch (const CsvError& e) {                      \
      CAPTURE(e.what());                               \
      CHECK(mentions(e, needle));                      \
    }                                                  \
  } while (0)

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("round trip through format and parse") {
  oracles::InstanceGen gen(10);
  Dataset data = gen.dataset(40, 3, true);
  data.x(0, 0) = 0.1 + 0.2;  // not exactly 0.3
  data.x(1, 1) = 1e-17;
  data.x(2, 2) = -12345.678901234567;

  std::string text = format_dataset_csv(data);
  InputTable table = parse_input_csv(text);
  CHECK(table.data.x == data.x);  // 17 significant digits survive exactly
  CHECK(table.data.y == data.y);
  CHECK(table.data.a_obs == data.a_obs);
  REQUIRE(table.data.dual());
  CHECK(*table.data.a_obs2 == *data.a_obs2);
  CHECK(table.covariate_names == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK_FALSE(table.has_a_true);
}

TEST_CASE("truth column round trips when requested") {
  oracles::InstanceGen gen(4);
  Dataset data = gen.dataset(10, 1, false);
  BinaryVector truth(10);
  for (Eigen::Index i = 0; i < 10; ++i) truth[i] = gen.coin();
  std::string text = format_dataset_csv(data, &truth);
  CHECK(text.substr(0, text.find('\n')) == "y,a_obs,a_true,x1");
  InputTable table = parse_input_csv(text);
  CHECK(table.has_a_true);
  CHECK(table.a_true == truth);
  CHECK(table.data.n_covariates() == 1);
}

TEST_CASE("windows line endings and a missing final newline both parse") {
  std::string text = "y,a_obs,z\r\n1,0,2.5\r\n0,1,-1.25";
  InputTable table = parse_input_csv(text);
  CHECK(table.data.n_rows() == 2);
  CHECK(table.data.x(0, 0) == 2.5);
  CHECK(table.data.x(1, 0) == -1.25);
  CHECK(table.covariate_names == std::vector<std::string>{"z"});
}

TEST_CASE("covariates keep file order, whatever their names") {
  std::string text = "weight,y,apple,a_obs\n0.5,1,2.0,0\n1.5,0,3.0,1\n";
  InputTable table = parse_input_csv(text);
  CHECK(table.covariate_names == std::vector<std::string>{"weight", "apple"});
  CHECK(table.data.x(0, 0) == 0.5);
  CHECK(table.data.x(0, 1) == 2.0);
}

TEST_CASE("covariate override selects and orders a subset") {
  std::string text = "y,a_obs,p,q,r\n1,0,1.0,2.0,3.0\n0,1,4.0,5.0,6.0\n";
  InputTable table = parse_input_csv(text, {"r", "p"});
  CHECK(table.covariate_names == std::vector<std::string>{"r", "p"});
  CHECK(table.data.x(0, 0) == 3.0);
  CHECK(table.data.x(0, 1) == 1.0);
  CHECK(table.data.n_covariates() == 2);

  CHECK_CSV_ERROR(parse_input_csv(text, {"missing"}), "missing");
  CHECK_CSV_ERROR(parse_input_csv(text, {"y"}), "y");  // reserved name
}

TEST_CASE("structural errors name the offending location") {
  CHECK_CSV_ERROR(parse_input_csv(""), "empty");
  CHECK_CSV_ERROR(parse_input_csv("a_obs,x1\n0,1.0\n"), "y");
  CHECK_CSV_ERROR(parse_input_csv("y,x1\n0,1.0\n"), "a_obs");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs\n1\n"), "row 1");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n1,0,0.5\n0,1\n"), "row 2");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n"), "no data");
}

TEST_CASE("cell-level errors name row and column") {
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n2,0,1.0\n"), "y");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n1,0,1.0\n0,0.5,2.0\n"), "row 2");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n1,0,\n"), "x1");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n1,0,apple\n"), "x1");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n1,0,nan\n"), "x1");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n1,,1.0\n"), "a_obs");
}

TEST_CASE("binary columns accept only values equal to 0 or 1") {
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n-1,0,2.0\n"), "y");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,a_obs2,x1\n1,0,7,2.0\n"), "a_obs2");
  CHECK_CSV_ERROR(parse_input_csv("y,a_obs,x1\n1,0.2,2.0\n"), "a_obs");
  InputTable fine = parse_input_csv("y,a_obs,x1\n 1 , 0 ,2.0\n");  // trimmed
  CHECK(fine.data.y[0] == 1);
  InputTable decimal = parse_input_csv("y,a_obs,x1\n1.0,0.0,2.0\n");
  CHECK(decimal.data.y[0] == 1);
  CHECK(decimal.data.a_obs[0] == 0);
}

TEST_CASE("file writes are atomic and readable back") {
  std::string dir = "/tmp/underreport_csv_test";
  std::string path = dir + "_roundtrip.txt";
  std::string content = "line one\nline two\n";
  write_file_atomic(path, content);
  CHECK(read_file(path) == content);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_file(path), CsvError);
}

TEST_CASE("formatted output uses unix newlines and a fixed header") {
  Dataset data;
  data.x = Matrix::Zero(2, 2);
  data.y.resize(2);
  data.y << 1, 0;
  data.a_obs.resize(2);
  data.a_obs << 0, 1;
  data.a_obs2 = BinaryVector(2);
  (*data.a_obs2) << 1, 1;
  std::string text = format_dataset_csv(data);
  CHECK(text.substr(0, text.find('\n')) == "y,a_obs,a_obs2,x1,x2");
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
}

}  // TEST_SUITE
