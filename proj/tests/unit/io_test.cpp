#include "chromainv/error.hpp"
#include "chromainv/io.hpp"
#include "chromainv/serialization.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace {

using namespace chromainv;
namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
protected:
  void SetUp() override
  {
    dir_ = fs::path(::testing::TempDir()) /
           ("chromainv_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

Dataset small_dataset()
{
  Dataset d;
  d.meta.seed = 42;
  d.meta.column.n_cells = 30;
  d.meta.column.horizon = 300.0;
  d.meta.column.n_time_points = 3;
  d.meta.time_grid = {100.0, 200.0, 300.0};
  Sample a;
  a.response = {0.0, 1.5, 1e-300};
  a.injection = {5.0, 15.0};
  a.target = IsothermParams{std::array<double, 8>{1, 2, 3, 4, 5, 6, 7, 8}};
  Sample r;
  r.response = {0.1, 0.2, 0.3};
  r.injection = {30.0, 30.0};
  r.origin = Origin::real;
  d.samples = {a, r};
  return d;
}

TEST_F(IoTest, DatasetRoundTrip)
{
  const Dataset d = small_dataset();
  save_dataset(dir_ / "ds", d);
  const Dataset back = load_dataset(dir_ / "ds");
  ASSERT_EQ(back.samples.size(), 2u);
  EXPECT_EQ(back.meta.time_grid, d.meta.time_grid);
  EXPECT_EQ(back.meta.seed, 42u);
  EXPECT_EQ(back.meta.column.n_cells, 30);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back.samples[k].response, d.samples[k].response);
    EXPECT_EQ(back.samples[k].injection, d.samples[k].injection);
    EXPECT_EQ(back.samples[k].target, d.samples[k].target);
    EXPECT_EQ(back.samples[k].origin, d.samples[k].origin);
  }
  EXPECT_EQ(dataset_fingerprint(back), dataset_fingerprint(d));
}

TEST_F(IoTest, FingerprintTracksContent)
{
  Dataset d = small_dataset();
  const std::string before = dataset_fingerprint(d);
  d.samples[0].response[1] = 1.5000001;
  EXPECT_NE(dataset_fingerprint(d), before);
}

TEST_F(IoTest, MissingDatasetIsIoError)
{
  EXPECT_THROW(load_dataset(dir_ / "absent"), IoError);
}

TEST_F(IoTest, TruncatedSamplesFileIsRejected)
{
  save_dataset(dir_ / "ds", small_dataset());
  fs::resize_file(dir_ / "ds" / "samples.f64", 16);
  EXPECT_ANY_THROW(load_dataset(dir_ / "ds"));
}

TEST_F(IoTest, ChromatogramCsvRoundTrip)
{
  const Chromatogram c{{3.0, 6.0, 9.0}, {0.0, 0.123456789, 2.5}};
  write_chromatogram_csv(dir_ / "c.csv", c);
  const Chromatogram back = read_chromatogram_csv(dir_ / "c.csv");
  EXPECT_EQ(back.time, c.time);
  EXPECT_EQ(back.response, c.response);
}

TEST_F(IoTest, MalformedChromatogramCsvIsValidationError)
{
  std::ofstream(dir_ / "bad.csv") << "t,response\n1,abc\n";
  EXPECT_THROW(read_chromatogram_csv(dir_ / "bad.csv"), ValidationError);
  std::ofstream(dir_ / "neg.csv") << "t,response\n1,1\n2,-3\n";
  EXPECT_THROW(read_chromatogram_csv(dir_ / "neg.csv"), ValidationError);
  EXPECT_THROW(read_chromatogram_csv(dir_ / "missing.csv"), IoError);
}

TEST_F(IoTest, ModelRoundTripChecksStatistics)
{
  Rng rng = make_stream(1, "init");
  const FnnModel m = FnnModel::initialized({5, 4, 8}, Activation::tanh, rng);
  const NormStats stats{{1, 2, 3, 4, 5}, {1, 1, 0, 2, 3}};
  save_model(dir_ / "model.json", m, stats);
  save_norm_stats(dir_ / "stats.json", stats);
  const NormStats stats_back = load_norm_stats(dir_ / "stats.json");
  EXPECT_EQ(stats_back.mean, stats.mean);
  EXPECT_EQ(stats_back.stddev, stats.stddev);
  const FnnModel back = load_model(dir_ / "model.json", stats_back);
  EXPECT_TRUE(back == m);
  const NormStats other{{1, 2, 3, 4, 6}, {1, 1, 0, 2, 3}};
  EXPECT_THROW(load_model(dir_ / "model.json", other), ValidationError);
}

TEST_F(IoTest, CsvWritersEmitHeaders)
{
  write_history_csv(dir_ / "h.csv", {EpochRecord{1, 2.0, 1.5, 0.5, 0.25}});
  std::ifstream h(dir_ / "h.csv");
  std::string line;
  std::getline(h, line);
  EXPECT_EQ(line, "epoch,loss,data_term,train_r2,val_r2");
  std::getline(h, line);
  EXPECT_EQ(line, "1,2,1.5,0.5,0.25");

  CvReport r;
  r.folds = {CvFold{0.5, 0.4, 8, 2}, CvFold{0.7, 0.6, 8, 2}};
  r.mean_train_r2 = 0.6;
  r.mean_val_r2 = 0.5;
  write_cv_csv(dir_ / "cv.csv", r);
  std::ifstream cv(dir_ / "cv.csv");
  std::vector<std::string> lines;
  while (std::getline(cv, line))
    lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines.front(), "fold,train_r2,val_r2,train_size,val_size");
  EXPECT_EQ(lines.back().substr(0, 5), "mean,");
}

TEST(Serialization, ConfigRoundTrips)
{
  ColumnConfig c;
  c.n_cells = 77;
  c.horizon = 1200.0;
  const ColumnConfig cb = column_config_from_json(to_json(c));
  EXPECT_EQ(cb.n_cells, 77);
  EXPECT_EQ(cb.horizon, 1200.0);
  EXPECT_FALSE(cb.diffusion.has_value());

  TrainConfig t;
  t.optimizer = Optimizer::adam;
  t.loss_norm = LossNorm::l1;
  t.seed = 99;
  const TrainConfig tb = train_config_from_json(to_json(t));
  EXPECT_EQ(tb.optimizer, Optimizer::adam);
  EXPECT_EQ(tb.loss_norm, LossNorm::l1);
  EXPECT_EQ(tb.seed, 99u);

  const GridSpace g = grid_space_from_json(to_json(GridSpace::standard()));
  EXPECT_EQ(g.size(), 64u);

  VariationalConfig v;
  v.alpha = 1e-6;
  v.restarts = 4;
  const VariationalConfig vb = variational_config_from_json(to_json(v));
  EXPECT_EQ(vb.alpha, 1e-6);
  EXPECT_EQ(vb.restarts, 4);
  EXPECT_EQ(vb.initial, v.initial);
}

TEST(Serialization, UnknownKeysAreRejected)
{
  EXPECT_THROW(column_config_from_json(Json{{"lenght", 10.0}}), ValidationError);
  EXPECT_THROW(train_config_from_json(Json{{"epoch", 10}}), ValidationError);
  EXPECT_THROW(hyperparams_from_json(Json{{"hidden", {8}}, {"dropout", 0.5}}), ValidationError);
}

TEST(Serialization, PartialConfigKeepsDefaults)
{
  TrainConfig base;
  base.epochs = 7;
  const TrainConfig t = train_config_from_json(Json{{"batch_size", 8}}, base);
  EXPECT_EQ(t.epochs, 7);
  EXPECT_EQ(t.batch_size, 8);
}

} // namespace
