#include "handgest/frame_io.hpp"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "handgest/errors.hpp"
#include "synthetic.hpp"

using namespace handgest;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "handgest_frame_io_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(FrameRecord, SerializesAndParsesBack) {
  handgest::testing::Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto hand = handgest::testing::random_hand(rng, "frame" + std::to_string(i));
    const FrameRecord rec{hand, i % 2 ? std::optional<std::int64_t>(i * 200) : std::nullopt};
    const auto back = parse_frame_record(to_json_line(rec));
    EXPECT_EQ(back.landmarks, hand);
    EXPECT_EQ(back.timestamp_ms, rec.timestamp_ms);
  }
}

TEST(FrameRecord, OptionalFieldsDefault) {
  std::string pts = "[";
  for (int i = 0; i < 21; ++i) pts += std::string(i ? "," : "") + "[0.1,0.2,0.3]";
  pts += "]";
  const auto rec = parse_frame_record("{\"landmarks\":" + pts + "}");
  EXPECT_EQ(rec.landmarks.handedness(), Handedness::kUnknown);
  EXPECT_TRUE(rec.landmarks.source_id().empty());
  EXPECT_FALSE(rec.timestamp_ms);
}

TEST(FrameRecord, SchemaViolationsCarryLineNumber) {
  try {
    parse_frame_record("{\"landmarks\":[[0,0,0]]}", 7);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
  EXPECT_THROW(parse_frame_record("{oops"), FormatError);
  EXPECT_THROW(parse_frame_record("[1,2]"), FormatError);
  std::string pts = "[";
  for (int i = 0; i < 21; ++i) pts += std::string(i ? "," : "") + "[0,0,0]";
  pts += "]";
  EXPECT_THROW(parse_frame_record("{\"landmarks\":" + pts + ",\"handedness\":\"Both\"}"),
               FormatError);
  EXPECT_THROW(parse_frame_record("{\"landmarks\":" + pts + ",\"timestamp_ms\":1.5}"),
               FormatError);
}

TEST(FrameFile, AcceptsSingleObjectOrJsonLines) {
  handgest::testing::Rng rng(2);
  const auto a = handgest::testing::random_hand(rng, "a");
  const auto b = handgest::testing::random_hand(rng);
  const auto single = temp_file("single.json", to_json_line({a, {}}));
  ASSERT_EQ(load_frame_file(single).size(), 1u);
  EXPECT_EQ(load_frame_file(single)[0].landmarks.source_id(), "a");

  const auto multi = temp_file("multi.jsonl", to_json_line({a, {}}) + "\n\n" +
                                                  to_json_line({b, 40}) + "\n");
  const auto frames = load_frame_file(multi);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[1].landmarks.source_id(), "multi#1");
  EXPECT_EQ(frames[1].timestamp_ms, 40);

  EXPECT_THROW(load_frame_file("/nonexistent.jsonl"), FormatError);
}

TEST(AnchorFile, LoadsAndValidates) {
  const auto ok = temp_file("anchors.json", anchors_to_json(default_reference_anchors()));
  EXPECT_EQ(load_anchor_file(ok), default_reference_anchors());
  const auto flat =
      temp_file("flat.json", R"({"anchors":[[0,0,0],[1,0,0],[0,1,0],[1,1,0]]})");
  EXPECT_THROW(load_anchor_file(flat), AnchorDegenerate);
  const auto short_ = temp_file("short.json", R"({"anchors":[[0,0,0]]})");
  EXPECT_THROW(load_anchor_file(short_), FormatError);
}
