#include <doctest.h>

#include "clustermerge/dist/connection.hpp"
#include "clustermerge/dist/protocol.hpp"

using namespace clustermerge::dist;

namespace {

Message round_trip(const Message& msg) {
  const auto frame = encode_frame(msg);
  REQUIRE(frame.size() >= kFrameHeaderSize);
  const std::uint32_t len = frame[0] | frame[1] << 8 | frame[2] << 16 | static_cast<std::uint32_t>(frame[3]) << 24;
  REQUIRE(len == frame.size() - kFrameHeaderSize);
  CHECK(frame[4] == static_cast<std::uint8_t>(message_type(msg)));
  return decode_payload(frame[4], std::span(frame).subspan(kFrameHeaderSize));
}

}  // namespace

TEST_CASE("every message round-trips") {
  const WireCluster c{4, {4, 9, 1}};
  const std::vector<Message> messages = {
      Hello{1, 0x0123456789abcdefULL, 8},
      Ready{},
      BatchTask{7, {{c}, {c, WireCluster{2, {2}}}}},
      PartialTask{8, 8, false, c, 3, 5, {}},
      PartialTask{8, 8, true, c, 0, 2, {c, c}},
      CacheSet{8, {c}},
      BatchResult{7, {c}},
      PartialResult{9, true, {{kC1Slot, false, {5}}, {2, false, {4, 9}}}},
      ErrorMessage{ErrorCode::UnknownCacheSet, "no such set"},
      Shutdown{},
  };
  for (const auto& msg : messages) CHECK(round_trip(msg) == msg);
}

TEST_CASE("hello is bit-exact") {
  const auto frame = encode_frame(Hello{1, 0x0807060504030201ULL, 0x0a09});
  const std::vector<std::uint8_t> expected = {12, 0, 0, 0, 0x01, 1, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(frame == expected);
}

TEST_CASE("partial result layout") {
  const auto payload = encode_payload(PartialResult{1, false, {{3, true, {0x11223344}}}});
  const std::vector<std::uint8_t> expected = {
      1, 0, 0, 0, 0, 0, 0, 0,  // merge_id
      0,                       // c1_fully_merged
      1, 0, 0, 0,              // entry_count
      3, 0, 0, 0,              // slot
      1,                       // fully_merged
      1, 0, 0, 0,              // added_count
      0x44, 0x33, 0x22, 0x11,
  };
  CHECK(payload == expected);
}

TEST_CASE("decoder is strict") {
  auto payload = encode_payload(BatchResult{7, {WireCluster{1, {1, 2}}}});
  SUBCASE("trailing bytes") {
    payload.push_back(0);
    CHECK_THROWS_AS(decode_payload(0x06, payload), ProtocolError);
  }
  SUBCASE("truncation") {
    payload.pop_back();
    CHECK_THROWS_AS(decode_payload(0x06, payload), ProtocolError);
  }
  SUBCASE("unknown type") { CHECK_THROWS_AS(decode_payload(0x42, payload), ProtocolError); }
  SUBCASE("bad flag byte") {
    auto p = encode_payload(PartialResult{1, false, {}});
    p[8] = 2;
    CHECK_THROWS_AS(decode_payload(0x07, p), ProtocolError);
  }
}

TEST_CASE("endpoint parsing") {
  CHECK(Endpoint::parse(":9000").host.empty());
  CHECK(Endpoint::parse(":9000").port == 9000);
  CHECK(Endpoint::parse("localhost:1").host == "localhost");
  CHECK_THROWS(Endpoint::parse("nohost"));
  CHECK_THROWS(Endpoint::parse("h:99999"));
}

TEST_CASE("frames over a loopback socket") {
  Listener listener({"127.0.0.1", 0});
  auto client = Connection::connect({"127.0.0.1", listener.port()}, std::chrono::seconds(5));
  auto server = listener.accept();
  REQUIRE(server);
  client.send(Hello{1, 42, 3});
  client.send(Ready{});
  auto f1 = server->receive();
  REQUIRE(f1);
  CHECK(decode_payload(f1->type, f1->payload) == Message{Hello{1, 42, 3}});
  auto f2 = server->receive();
  REQUIRE(f2);
  CHECK(f2->type == 0x02);
  client.close();
  CHECK_FALSE(server->receive());
}
