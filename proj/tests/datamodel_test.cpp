#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tsdr/datamodel.hpp"
#include "tsdr/error.hpp"

namespace tsdr {
namespace {

namespace fs = std::filesystem;

class TempFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("tsdr_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path Write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p;
  }

  fs::path dir_;
};

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected tsdr::Error";
  return ErrorCode::kInvalidArgument;
}

Schema SimpleSchema() {
  Schema s;
  s.name = "simple";
  s.task = Task::kRegression;
  s.missing_markers = {"?"};
  s.columns = {ColumnSpec{.name = "s", .role = Role::kSensitive, .kind = Kind::kBinary},
               ColumnSpec{.name = "a", .role = Role::kNonsensitive},
               ColumnSpec{.name = "y", .role = Role::kTarget}};
  return s;
}

TEST(ExpandDummies, OneHotRows) {
  const std::vector<std::string> v{"a", "b", "a"};
  const auto cats = LearnCategories(v);
  EXPECT_EQ(cats, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(ExpandDummies(v, cats), (Matrix{{1, 0}, {0, 1}, {1, 0}}));
}

TEST(ExpandDummies, SingleCategoryIsAllOnes) {
  const std::vector<std::string> v{"q", "q", "q"};
  EXPECT_EQ(ExpandDummies(v, LearnCategories(v)), (Matrix{{1}, {1}, {1}}));
}

TEST(ExpandDummies, FirstAppearanceOrderAndRowSums) {
  const std::vector<std::string> v{"z", "a", "m", "a", "z", "k"};
  const auto cats = LearnCategories(v);
  EXPECT_EQ(cats, (std::vector<std::string>{"z", "a", "m", "k"}));
  const Matrix d = ExpandDummies(v, cats);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    double sum = 0;
    for (double x : d.row(r)) sum += x;
    EXPECT_EQ(sum, 1.0);
  }
}

TEST(ExpandDummies, UnseenCategoryIsStructuredError) {
  const std::vector<std::string> train{"a", "b"};
  const std::vector<std::string> test{"c"};
  EXPECT_EQ(CodeOf([&] { ExpandDummies(test, train); }), ErrorCode::kUnseenCategory);
}

TEST(BinarizeThreshold, Comparisons) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_EQ(BinarizeThreshold(v, 2, Comparison::kGreaterEqual), (std::vector<double>{0, 1, 1}));
  EXPECT_EQ(BinarizeThreshold(v, 2, Comparison::kLess), (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(BinarizeThreshold(v, 2, Comparison::kGreater), (std::vector<double>{0, 0, 1}));
  EXPECT_EQ(BinarizeThreshold(v, 2, Comparison::kLessEqual), (std::vector<double>{1, 1, 0}));
}

TEST_F(TempFiles, MissingMarkerDropsRow) {
  const auto p = Write("d.csv", "s,a,y\n1,0.5,2\n0,?,3\n1,1.5,4\n");
  const Dataset ds = LoadCsv(p, SimpleSchema());
  EXPECT_EQ(ds.rows(), 2u);
  EXPECT_EQ(ds.targets(), (std::vector<double>{2, 4}));
  EXPECT_EQ(ds.z_names, (std::vector<std::string>{kInterceptName}));
  EXPECT_EQ(ds.z.column(0), (std::vector<double>{1, 1}));
  EXPECT_TRUE(ds.s_binary[0]);
}

TEST_F(TempFiles, MissingMarkerInUnusedColumnKeepsRow) {
  const auto p = Write("d.csv", "s,a,junk,y\n1,0.5,?,2\n0,1,x,3\n");
  EXPECT_EQ(LoadCsv(p, SimpleSchema()).rows(), 2u);
}

TEST_F(TempFiles, UnknownSchemaColumnIsNamed) {
  const auto p = Write("d.csv", "s,b,y\n1,2,3\n");
  try {
    LoadCsv(p, SimpleSchema());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
}

TEST_F(TempFiles, BadNumberReportsCoordinates) {
  const auto p = Write("d.csv", "s,a,y\n1,0.5,2\n0,abc,3\n");
  try {
    LoadCsv(p, SimpleSchema());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'a'"), std::string::npos) << msg;
  }
}

TEST_F(TempFiles, EmptyResultIsError) {
  const auto p = Write("d.csv", "s,a,y\n1,?,2\n");
  EXPECT_EQ(CodeOf([&] { LoadCsv(p, SimpleSchema()); }), ErrorCode::kEmptyResult);
}

TEST_F(TempFiles, QuotedFieldsAndCategoricals) {
  const auto p = Write("d.csv", "s,a,c,y\n1,1,\"x, y\",2\n0,2,plain,3\n1,3,\"x, y\",4\n");
  Schema schema = SimpleSchema();
  schema.columns.push_back(ColumnSpec{.name = "c", .role = Role::kNonsensitive, .kind = Kind::kCategorical});
  const Dataset ds = LoadCsv(p, schema);
  EXPECT_EQ(ds.x_names, (std::vector<std::string>{"a", "c=x, y", "c=plain"}));
  EXPECT_EQ(ds.x.column(1), (std::vector<double>{1, 0, 1}));
}

TEST_F(TempFiles, LoadIsDeterministic) {
  const auto p = Write("d.csv", "s,a,y\n1,0.5,2\n0,7,3\n1,1.5,4\n");
  const Dataset a = LoadCsv(p, SimpleSchema());
  const Dataset b = LoadCsv(p, SimpleSchema());
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.y, b.y);
}

TEST_F(TempFiles, SchemaFileWithBaseOverride) {
  Write("base.json", R"({"name": "b", "task": "classification", "columns": [
      {"name": "s", "role": "sensitive", "kind": "binary"},
      {"name": "a", "role": "nonsensitive"},
      {"name": "y", "role": "target", "kind": "binary", "positive_values": ["yes"]}]})");
  const auto child = Write("child.json", R"({"base": "base.json", "name": "c", "columns": [
      {"name": "a", "role": "sensitive", "kind": "numeric", "replace": true},
      {"name": "s", "role": "nonsensitive"}]})");
  const Schema s = LoadSchema(child);
  EXPECT_EQ(s.name, "c");
  EXPECT_EQ(s.task, Task::kClassification);
  ASSERT_EQ(s.columns.size(), 3u);
  EXPECT_EQ(s.columns[0].role, Role::kNonsensitive);
  EXPECT_EQ(s.columns[0].kind, Kind::kBinary);
  EXPECT_EQ(s.columns[1].role, Role::kSensitive);
}

TEST_F(TempFiles, SchemaNeedsExactlyOneTarget) {
  const auto p = Write("s.json", R"({"columns": [{"name": "a"}]})");
  EXPECT_EQ(CodeOf([&] { LoadSchema(p); }), ErrorCode::kSchema);
}

TEST_F(TempFiles, BinarizeOnlyForNumeric) {
  const auto p = Write("s.json", R"({"columns": [{"name": "y", "role": "target"},
      {"name": "a", "kind": "categorical", "binarize": {"cut": 1}}]})");
  EXPECT_EQ(CodeOf([&] { LoadSchema(p); }), ErrorCode::kSchema);
}

TEST_F(TempFiles, NamesFileDefaultsAndColumnsWithMissing) {
  Write("t.names", "@attribute id numeric\n@attribute a numeric\n@attribute b numeric\n@attribute g numeric\n"
                   "@attribute y numeric\n");
  const auto data = Write("t.data", "1,0.1,?,0.2,1\n2,0.3,0.5,0.9,2\n3,0.6,0.1,0.1,3\n");
  const auto schema = Write("t.json", R"({"header": false, "names_file": "t.names", "missing_markers": ["?"],
      "default": {"role": "nonsensitive", "kind": "numeric"}, "drop_columns_with_missing": true,
      "columns": [{"name": "id", "role": "ignore"},
                  {"name": "g", "role": "sensitive", "kind": "numeric", "binarize": {"cut": 0.15}},
                  {"name": "y", "role": "target"}]})");
  const Dataset ds = LoadCsv(data, LoadSchema(schema));
  EXPECT_EQ(ds.rows(), 3u);
  EXPECT_EQ(ds.x_names, (std::vector<std::string>{"a"}));
  EXPECT_EQ(ds.s.column(0), (std::vector<double>{1, 1, 0}));
}

TEST_F(TempFiles, RowFilters) {
  const auto data = Write("f.csv", "d,deg,y\n-31,F,1\n0,F,0\n5,O,1\n30,M,1\n,F,0\n");
  Schema s;
  s.task = Task::kClassification;
  s.columns = {ColumnSpec{.name = "d", .role = Role::kIgnore, .keep_min = -30.0, .keep_max = 30.0},
               ColumnSpec{.name = "deg", .role = Role::kSensitive, .kind = Kind::kBinary,
                          .positive_values = {"F"}, .exclude_values = {"O"}},
               ColumnSpec{.name = "y", .role = Role::kTarget, .kind = Kind::kBinary}};
  const Dataset ds = LoadCsv(data, s);
  EXPECT_EQ(ds.rows(), 2u);
  EXPECT_EQ(ds.s.column(0), (std::vector<double>{1, 0}));
}

TEST_F(TempFiles, WhitespaceDelimitedOrdinalLevels) {
  const auto data = Write("w.data", "A11  3 1\nA13 4  2\n  A12 5 1\n");
  Schema s;
  s.task = Task::kClassification;
  s.whitespace_delimited = true;
  s.has_header = false;
  s.column_names = {"chk", "v", "cls"};
  s.columns = {ColumnSpec{.name = "chk", .kind = Kind::kCategorical, .ordinal_levels = {"A11", "A12", "A13"}},
               ColumnSpec{.name = "v", .role = Role::kSensitive},
               ColumnSpec{.name = "cls", .role = Role::kTarget, .kind = Kind::kBinary, .positive_values = {"1"}}};
  const Dataset ds = LoadCsv(data, s);
  EXPECT_EQ(ds.x.column(0), (std::vector<double>{0, 2, 1}));
  EXPECT_EQ(ds.targets(), (std::vector<double>{1, 0, 1}));
}

// Adult-format rows covering every category of every encoded column.
TEST_F(TempFiles, AdultSchemaEncodesFortyNineAttributes) {
  const std::vector<std::string> workclass{"Private",   "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
                                           "Local-gov", "State-gov",        "Without-pay"};
  const std::vector<std::string> education{"Bachelors", "Some-college", "11th",      "HS-grad",   "Prof-school",
                                           "Assoc-acdm", "Assoc-voc",   "9th",       "7th-8th",   "12th",
                                           "Masters",   "1st-4th",      "10th",      "Doctorate", "5th-6th",
                                           "Preschool"};
  const std::vector<std::string> marital{"Married-civ-spouse", "Divorced", "Never-married", "Separated",
                                         "Widowed", "Married-spouse-absent", "Married-AF-spouse"};
  const std::vector<std::string> occupation{
      "Tech-support", "Craft-repair",     "Other-service",     "Sales",        "Exec-managerial",
      "Prof-specialty", "Handlers-cleaners", "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
      "Transport-moving", "Priv-house-serv", "Protective-serv",  "Armed-Forces"};
  const std::vector<std::string> relationship{"Wife", "Own-child", "Husband", "Not-in-family", "Other-relative",
                                              "Unmarried"};
  std::ostringstream csv;
  for (std::size_t i = 0; i < 16; ++i) {
    csv << 20 + i << ", " << workclass[i % 7] << ", 1000, " << education[i] << ", 9, " << marital[i % 7] << ", "
        << occupation[i % 14] << ", " << relationship[i % 6] << ", White, " << (i % 2 ? "Male" : "Female")
        << ", 0, 0, 40, " << (i % 3 ? "United-States" : "Mexico") << ", " << (i % 4 ? "<=50K" : ">50K.") << "\n";
  }
  csv << "30, ?, 1000, HS-grad, 9, Divorced, ?, Wife, White, Male, 0, 0, 40, United-States, <=50K\n";
  const auto data = Write("adult.csv", csv.str());
  const Schema schema = LoadSchema(fs::path(TSDR_SOURCE_DIR) / "data/schemas/adult.json");
  const Dataset ds = LoadCsv(data, schema);
  EXPECT_EQ(ds.rows(), 16u);
  EXPECT_EQ(ds.x.cols(), 49u);
  EXPECT_EQ(ds.s_names, (std::vector<std::string>{"sex"}));
  EXPECT_EQ(ds.targets()[0], 1.0);
  EXPECT_EQ(ds.targets()[1], 0.0);
  std::size_t education_cols = 0;
  for (const auto& n : ds.x_names) education_cols += n.rfind("education=", 0) == 0 ? 1 : 0;
  EXPECT_EQ(education_cols, 10u);
}

TEST_F(TempFiles, GermanSchemaEncodesFortySevenAttributes) {
  const std::vector<std::vector<std::string>> cats{
      {"A30", "A31", "A32", "A33", "A34"},
      {"A40", "A41", "A42", "A43", "A44", "A45", "A46", "A48", "A49", "A410"},
      {"A91", "A92", "A93", "A94"},
      {"A101", "A102", "A103"},
      {"A121", "A122", "A123", "A124"},
      {"A141", "A142", "A143"},
      {"A151", "A152", "A153"},
      {"A171", "A172", "A173", "A174"}};
  std::ostringstream rows;
  for (std::size_t i = 0; i < 10; ++i) {
    auto c = [&](std::size_t k) { return cats[k][i % cats[k].size()]; };
    rows << "A1" << 1 + i % 4 << ' ' << 6 + i << ' ' << c(0) << ' ' << c(1) << ' ' << 1000 + i << " A6" << 1 + i % 5
         << " A7" << 1 + i % 5 << " 2 " << c(2) << ' ' << c(3) << " 3 " << c(4) << ' ' << 20 + 3 * i << ' '
         << c(5) << ' ' << c(6) << " 1 " << c(7) << " 1 A19" << 1 + i % 2 << " A20" << 1 + i % 2 << ' '
         << 1 + i % 2 << "\n";
  }
  const auto data = Write("german.data", rows.str());
  const Dataset ds = LoadCsv(data, LoadSchema(fs::path(TSDR_SOURCE_DIR) / "data/schemas/german.json"));
  EXPECT_EQ(ds.x.cols(), 47u);
  // Young (< 25) is the positive group: ages 20, 23 of 20, 23, ..., 47.
  EXPECT_EQ(ds.s.column(0)[0], 1.0);
  EXPECT_EQ(ds.s.column(0)[1], 1.0);
  EXPECT_EQ(ds.s.column(0)[2], 0.0);
  EXPECT_EQ(ds.targets()[0], 1.0);
}

TEST(AllSchemas, Load) {
  for (const auto& entry : fs::directory_iterator(fs::path(TSDR_SOURCE_DIR) / "data/schemas")) {
    EXPECT_NO_THROW(LoadSchema(entry.path())) << entry.path();
  }
}

TEST(MakeSplits, FoldSizes) {
  SplitPlan plan{.kind = SplitPlan::Kind::kKFold, .folds = 3};
  auto sizes = [&](std::size_t n) {
    std::vector<std::size_t> out;
    for (const auto& s : MakeSplits(n, plan)) out.push_back(s.test.size());
    return out;
  };
  EXPECT_EQ(sizes(9), (std::vector<std::size_t>{3, 3, 3}));
  EXPECT_EQ(sizes(10), (std::vector<std::size_t>{4, 3, 3}));
}

TEST(MakeSplits, HoldoutUsesCeiling) {
  const auto s = MakeSplits(1000, SplitPlan{}).front();
  EXPECT_EQ(s.train.size(), 667u);
  EXPECT_EQ(s.test.size(), 333u);
}

TEST(MakeSplits, PartitionInvariant) {
  for (auto kind : {SplitPlan::Kind::kHoldout, SplitPlan::Kind::kKFold}) {
    SplitPlan plan{.kind = kind, .folds = 7, .seed = 3, .repeats = 2};
    std::vector<int> tested(103, 0);
    for (const auto& s : MakeSplits(103, plan)) {
      std::set<std::size_t> all(s.train.begin(), s.train.end());
      for (auto i : s.test) {
        EXPECT_FALSE(all.count(i));
        all.insert(i);
        ++tested[i];
      }
      EXPECT_EQ(all.size(), 103u);
    }
    if (kind == SplitPlan::Kind::kKFold)
      for (int t : tested) EXPECT_EQ(t, 2);
  }
}

TEST(MakeSplits, SeededAndRepeatsDiffer) {
  SplitPlan plan{.seed = 5, .repeats = 2};
  const auto a = MakeSplits(50, plan);
  const auto b = MakeSplits(50, plan);
  EXPECT_EQ(a[0].train, b[0].train);
  EXPECT_NE(a[0].train, a[1].train);
  plan.repeats = 1;
  plan.seed = 6;
  EXPECT_EQ(MakeSplits(50, plan)[0].train, a[1].train);
}

TEST(MakeSplits, RejectsBadPlans) {
  EXPECT_THROW(MakeSplits(2, SplitPlan{.kind = SplitPlan::Kind::kKFold, .folds = 3}), Error);
  EXPECT_THROW(MakeSplits(10, SplitPlan{.train_fraction = 1.0}), Error);
  EXPECT_THROW(MakeSplits(10, SplitPlan{.kind = SplitPlan::Kind::kKFold, .folds = 1}), Error);
}

TEST(MakeSplits, StratifiedKeepsClassBalance) {
  std::vector<double> labels(90, 0.0);
  for (std::size_t i = 0; i < 30; ++i) labels[i] = 1.0;
  const auto folds =
      MakeSplits(90, SplitPlan{.kind = SplitPlan::Kind::kKFold, .folds = 3, .stratify_on_target = true}, labels);
  for (const auto& f : folds) {
    std::size_t pos = 0;
    for (auto i : f.test) pos += labels[i] == 1.0 ? 1 : 0;
    EXPECT_EQ(pos, 10u);
  }
}

Dataset GroupedDataset(const std::vector<double>& s, const std::vector<std::vector<double>>& xcols) {
  Dataset ds;
  const std::size_t n = s.size();
  ds.s = Matrix::Column(s);
  ds.s_names = {"s"};
  ds.s_binary = {true};
  ds.x = Matrix(n, xcols.size());
  for (std::size_t k = 0; k < xcols.size(); ++k) {
    ds.x.set_column(k, xcols[k]);
    ds.x_names.push_back("x" + std::to_string(k));
    ds.x_binary.push_back(false);
  }
  ds.z = Matrix(n, 1, 1.0);
  ds.z_names = {kInterceptName};
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(i % 2);
  ds.y = Matrix::Column(y);
  ds.task = Task::kClassification;
  return ds;
}

TEST(QuantileTransform, MiddleRank) {
  const Dataset ds = GroupedDataset({1, 1, 1, 0, 0}, {{10, 20, 30, 5, 6}});
  const Dataset t = QuantileTransformApply(QuantileTransformFit(ds), ds);
  EXPECT_DOUBLE_EQ(t.x(1, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(t.x(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(t.x(4, 0), 0.5);
}

TEST(QuantileTransform, IdenticalValuesMapToZero) {
  const Dataset ds = GroupedDataset({1, 1, 0, 0}, {{4, 4, 4, 4}});
  const Dataset t = QuantileTransformApply(QuantileTransformFit(ds), ds);
  for (double v : t.x.values()) EXPECT_EQ(v, 0.0);
}

TEST(QuantileTransform, MatchesBruteForceAndIsUniformOnDistinctValues) {
  Rng rng(8);
  std::vector<double> s(100), a(100), b(100);
  for (std::size_t i = 0; i < 100; ++i) {
    s[i] = rng.Uniform() < 0.4 ? 1.0 : 0.0;
    a[i] = rng.Normal() + s[i];
    b[i] = static_cast<double>(rng.Below(5));
  }
  const Dataset ds = GroupedDataset(s, {a, b});
  const Dataset t = QuantileTransformApply(QuantileTransformFit(ds), ds);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto col = ds.x.column(k);
    for (double g : {0.0, 1.0}) {
      std::vector<double> group, mapped;
      for (std::size_t i = 0; i < 100; ++i)
        if (s[i] == g) group.push_back(col[i]);
      for (std::size_t i = 0; i < 100; ++i) {
        if (s[i] != g) continue;
        EXPECT_DOUBLE_EQ(t.x(i, k), oracle::BruteForceRank(group, col[i]));
        mapped.push_back(t.x(i, k));
        EXPECT_GE(t.x(i, k), 0.0);
        EXPECT_LT(t.x(i, k), 1.0);
      }
      if (k == 0) {
        std::sort(mapped.begin(), mapped.end());
        for (std::size_t j = 0; j < mapped.size(); ++j)
          EXPECT_DOUBLE_EQ(mapped[j], static_cast<double>(j) / static_cast<double>(mapped.size()));
      }
    }
  }
}

TEST(QuantileTransform, MissingGroupIsError) {
  const Dataset ds = GroupedDataset({1, 1, 1}, {{1, 2, 3}});
  EXPECT_EQ(CodeOf([&] { QuantileTransformFit(ds); }), ErrorCode::kDegenerateGroup);
}

std::size_t CountPositives(const Dataset& ds) {
  std::size_t n = 0;
  for (double v : ds.targets()) n += v == 1.0 ? 1 : 0;
  return n;
}

TEST(ResampleBalance, Counts) {
  Rng rng(1);
  Dataset even = GroupedDataset({0, 1, 0, 1, 0, 1}, {{1, 2, 3, 4, 5, 6}});
  const Dataset a = ResampleBalance(even, rng);
  EXPECT_EQ(a.rows(), 6u);
  EXPECT_EQ(CountPositives(a), 3u);

  Dataset skewed = GroupedDataset({0, 1, 0, 1, 0, 1, 0, 1}, {{1, 2, 3, 4, 5, 6, 7, 8}});
  skewed.y = Matrix::Column(std::vector<double>{1, 1, 0, 0, 0, 0, 0, 0});
  Rng r1(2), r2(2);
  const Dataset b = ResampleBalance(skewed, r1);
  EXPECT_EQ(b.rows(), 12u);
  EXPECT_EQ(CountPositives(b), 6u);
  EXPECT_EQ(b.x, ResampleBalance(skewed, r2).x);
  for (std::size_t i = 0; i < b.rows(); ++i)
    if (b.y(i, 0) == 1.0) EXPECT_TRUE(b.x(i, 0) == 1.0 || b.x(i, 0) == 2.0);
}

TEST(ResampleBalance, SingleClassIsError) {
  Rng rng(1);
  Dataset ds = GroupedDataset({0, 1}, {{1, 2}});
  ds.y = Matrix::Column(std::vector<double>{1, 1});
  EXPECT_THROW(ResampleBalance(ds, rng), Error);
}

TEST(DropCorrelatedWithTarget, DropsCopiesKeepsNoise) {
  Rng rng(3);
  const std::size_t n = 5000;
  std::vector<double> s(n), y(n), noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = static_cast<double>(i % 2);
    y[i] = rng.Normal();
    noise[i] = rng.Normal();
  }
  Dataset ds = GroupedDataset(s, {y, noise});
  ds.y = Matrix::Column(y);
  ds.task = Task::kRegression;
  const Dataset out = DropCorrelatedWithTarget(ds, 0.3);
  EXPECT_EQ(out.x_names, (std::vector<std::string>{"x1"}));
  Dataset only = GroupedDataset(s, {y});
  only.y = Matrix::Column(y);
  EXPECT_THROW(DropCorrelatedWithTarget(only, 0.3), Error);
}

TEST(ContinuousOnly, DropsBinaryColumns) {
  Dataset ds = GroupedDataset({0, 1, 0}, {{1, 2, 3}, {0, 1, 1}});
  ds.x_binary = {false, true};
  EXPECT_EQ(ContinuousOnly(ds).x_names, (std::vector<std::string>{"x0"}));
}

}  // namespace
}  // namespace tsdr
