#include "outcry/service.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "httplib.h"

namespace outcry {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { open({}); }

  void open(PerformanceConfig cfg) {
    service.reset();
    cfg.duration_ticks = 30;
    ServiceOptions opts;
    opts.auto_tick = false;
    service = std::make_unique<Service>(cfg, opts);
    port = service->start("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(5, 0);
  }

  httplib::Result post(const std::string& path, const json& body, const httplib::Headers& headers = {}) {
    return client->Post(path, headers, body.dump(), "application/json");
  }

  std::unique_ptr<Service> service;
  std::unique_ptr<httplib::Client> client;
  int port = 0;
};

TEST_F(ServiceTest, StateBeforeAndAfterStart) {
  auto res = client->Get("/state");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(json::parse(res->body).at("phase"), "idle");

  EXPECT_EQ(post("/admin/injection", json::object())->status, 409);
  EXPECT_EQ(post("/performance/start", json::object())->status, 200);
  EXPECT_EQ(post("/performance/start", json::object())->status, 409);
  service->advance_tick();
  const auto state = json::parse(client->Get("/state")->body);
  EXPECT_EQ(state.at("phase"), "running");
  EXPECT_EQ(state.at("tick"), 1);
  EXPECT_EQ(state.at("portfolios").size(), 12u);
}

TEST_F(ServiceTest, ConductorEndpoints) {
  post("/performance/start", json::object());
  EXPECT_EQ(post("/conductor/tempo", {{"bpm", 63}})->status, 200);
  EXPECT_EQ(post("/conductor/shout", {{"on", true}})->status, 200);
  EXPECT_EQ(post("/conductor/regime", {{"mode", "bust"}})->status, 200);
  for (int i = 0; i < 5; ++i) service->advance_tick();
  EXPECT_EQ(post("/conductor/regime", {{"mode", "auto"}})->status, 200);
  const auto state = json::parse(client->Get("/state")->body);
  EXPECT_EQ(state.at("tempo_bpm"), 63.0);
  EXPECT_EQ(state.at("shout"), true);
  EXPECT_EQ(state.dump().find("regime"), std::string::npos);

  EXPECT_EQ(post("/conductor/tempo", {{"bpm", "fast"}})->status, 400);
  EXPECT_EQ(post("/conductor/tempo", {{"bpm", -1}})->status, 409);
  EXPECT_EQ(post("/conductor/regime", {{"mode", "sideways"}})->status, 400);
  EXPECT_EQ(client->Post("/conductor/shout", "{not json", "application/json")->status, 400);
  EXPECT_EQ(post("/performance/end", json::object())->status, 200);
  EXPECT_EQ(json::parse(client->Get("/state")->body).at("payout").size(), 12u);
}

TEST_F(ServiceTest, AdminSlipsAndInjection) {
  post("/performance/start", json::object());
  const json buy = {{"trader", 1}, {"counterparty", 2}, {"side", "buy"}, {"stock", "Wealth"}, {"quantity", 2}, {"price", 100}};
  json sell = buy;
  sell["trader"] = 2;
  sell["counterparty"] = 1;
  sell["side"] = "sell";
  auto r1 = post("/admin/slip", buy);
  EXPECT_EQ(r1->status, 200);
  EXPECT_EQ(json::parse(r1->body).at("status"), "pending");
  auto r2 = post("/admin/slip", sell);
  EXPECT_EQ(json::parse(r2->body).at("status"), "matched");
  const auto state = json::parse(client->Get("/state")->body);
  EXPECT_EQ(state.at("recent_trades").size(), 1u);

  json unknown = buy;
  unknown["counterparty"] = 99;
  auto r3 = post("/admin/slip", unknown);
  EXPECT_EQ(r3->status, 409);
  EXPECT_EQ(json::parse(r3->body).at("reason"), "UnknownTrader");
  json fractional = buy;
  fractional["quantity"] = 1.5;
  EXPECT_EQ(post("/admin/slip", fractional)->status, 400);
  EXPECT_EQ(post("/admin/slip", {{"trader", 1}})->status, 400);

  EXPECT_EQ(post("/admin/injection", json::object())->status, 200);
  EXPECT_EQ(post("/admin/injection", {{"amount", "lots"}})->status, 400);
}

TEST_F(ServiceTest, TokensGuardCommands) {
  PerformanceConfig cfg;
  cfg.conductor_token = "baton";
  cfg.admin_token = "ledger";
  open(cfg);
  EXPECT_EQ(post("/performance/start", json::object())->status, 401);
  EXPECT_EQ(post("/performance/start", json::object(), {{"X-Outcry-Token", "ledger"}})->status, 401);
  EXPECT_EQ(post("/performance/start", json::object(), {{"X-Outcry-Token", "baton"}})->status, 200);
  EXPECT_EQ(post("/admin/injection", json::object(), {{"Authorization", "Bearer baton"}})->status, 401);
  EXPECT_EQ(post("/admin/injection", json::object(), {{"Authorization", "Bearer ledger"}})->status, 200);
  EXPECT_EQ(client->Get("/state")->status, 200);
}

TEST_F(ServiceTest, EventStreamCarriesRedactedRecords) {
  std::string received;
  std::atomic<bool> done{false};
  std::thread reader([&] {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    c.Get("/events", [&](const char* data, std::size_t len) {
      received.append(data, len);
      return !(received.find("\"Payout\"") != std::string::npos || done.load());
    });
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  post("/performance/start", json::object());
  post("/conductor/regime", {{"mode", "boom"}});
  for (int i = 0; i < 10; ++i) service->advance_tick();
  post("/conductor/regime", {{"mode", "bust"}});
  for (int i = 0; i < 20; ++i) service->advance_tick();
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (received.find("\"Payout\"") != std::string::npos) break;
  }
  done = true;
  reader.join();

  EXPECT_EQ(received.rfind("event: snapshot\ndata: ", 0), 0u);
  EXPECT_NE(received.find("event: record\ndata: "), std::string::npos);
  EXPECT_NE(received.find("\"News\""), std::string::npos);
  EXPECT_NE(received.find("\"Payout\""), std::string::npos);
  for (const char* word : {"regime", "RegimeChange", "boom", "bust", "\"normal\""}) {
    EXPECT_EQ(received.find(word), std::string::npos) << word;
  }
  // The full log still has the hidden data.
  bool forced = false;
  for (const auto& r : service->log()) forced |= r.kind == EventKind::ConductorCommand;
  EXPECT_TRUE(forced);
}

TEST(SseMessageTest, Format) {
  EXPECT_EQ(sse_message("record", "{}"), "event: record\ndata: {}\n\n");
}

TEST(BroadcasterTest, FansOutAndDropsClosed) {
  Broadcaster b;
  auto s1 = b.subscribe();
  auto s2 = b.subscribe();
  b.publish("x");
  EXPECT_EQ(s1->queue.size(), 1u);
  EXPECT_EQ(s2->queue.size(), 1u);
  b.unsubscribe(s1);
  b.publish("y");
  EXPECT_EQ(s1->queue.size(), 1u);
  EXPECT_EQ(s2->queue.size(), 2u);
  b.close_all();
  EXPECT_TRUE(s2->closed);
  EXPECT_EQ(b.subscribers(), 0u);
}

}  // namespace
}  // namespace outcry
