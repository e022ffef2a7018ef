#include <doctest.h>

#include <cmath>
#include <set>

#include "check_error.hpp"
#include "pnet/core/model.hpp"

using namespace pnet;

TEST_CASE("twelve kinds in three families") {
  CHECK(kAllKinds.size() == 12);
  std::set<std::string_view> names;
  int mats = 0, lias = 0, observers = 0;
  for (ModuleKind k : kAllKinds) {
    names.insert(kind_name(k));
    REQUIRE(parse_kind(kind_name(k)) == k);
    switch (family_of(k)) {
      case Family::Mat: ++mats; break;
      case Family::Lia: ++lias; break;
      case Family::Observer: ++observers; break;
    }
  }
  CHECK(names.size() == 12);
  CHECK(mats == 5);
  CHECK(lias == 5);
  CHECK(observers == 2);
  CHECK_FALSE(parse_kind("mas"));
  CHECK_FALSE(parse_kind("XYZ"));
}

TEST_CASE("parameter legality table") {
  auto legal = [](ModuleKind k) {
    std::set<std::string_view> out;
    for (Param p : legal_params(k)) out.insert(param_name(p));
    return out;
  };
  using S = std::set<std::string_view>;
  CHECK(legal(ModuleKind::MAS) == S{"M"});
  CHECK(legal(ModuleKind::CEL) == S{"M", "K", "Z"});
  CHECK(legal(ModuleKind::SOL).empty());
  CHECK(legal(ModuleKind::ENX).empty());
  CHECK(legal(ModuleKind::ENF).empty());
  CHECK(legal(ModuleKind::RES) == S{"K"});
  CHECK(legal(ModuleKind::FRO) == S{"Z"});
  CHECK(legal(ModuleKind::REF) == S{"K", "Z"});
  CHECK(legal(ModuleKind::BUT) == S{"K", "Z", "S"});
  CHECK(legal(ModuleKind::LNL) == S{"fK", "fZ"});
  CHECK(legal(ModuleKind::SOX) == S{"gain"});
  CHECK(legal(ModuleKind::SOF) == S{"gain"});
  for (ModuleKind k : kAllKinds) {
    CHECK(has_initial_state(k) == (family_of(k) == Family::Mat));
  }
  CHECK(state_name(StateVar::X0) == "X0");
  CHECK(parse_state("V0") == StateVar::V0);
}

TEST_CASE("add_module assigns ids from 1 with inert defaults") {
  Network net;
  ModuleId a = net.add_module(ModuleKind::MAS, {0, 0});
  CHECK(to_u64(a) == 1);
  CHECK(net.size() == 1);
  const Module& m = net.at(a);
  CHECK(m.params.M == 1.0);
  CHECK(m.init.X0 == 0.0);
  CHECK(m.init.V0 == 0.0);
  ModuleId lnl = net.add_module(ModuleKind::LNL);
  Table t = std::get<Table>(net.get_param(lnl, Param::fK));
  CHECK(t.x.size() == 2);
  CHECK(t.eval(-3.0) == 0.0);
  CHECK(t.eval(7.0) == 0.0);
  CHECK(net.validate().contains(IssueKind::DanglingLink, lnl));
}

TEST_CASE("many modules get distinct ids") {
  Network net;
  std::set<ModuleId> ids;
  for (int i = 0; i < 100000; ++i) ids.insert(net.add_module(ModuleKind::MAS));
  CHECK(net.size() == 100000);
  CHECK(ids.size() == 100000);
}

TEST_CASE("connect family rules") {
  Network net;
  ModuleId mas = net.add_module(ModuleKind::MAS);
  ModuleId sol = net.add_module(ModuleKind::SOL);
  ModuleId res = net.add_module(ModuleKind::RES);
  ModuleId res2 = net.add_module(ModuleKind::RES);
  ModuleId enf = net.add_module(ModuleKind::ENF);

  net.connect(res, mas, sol);
  CHECK(net.at(res).slots[0] == mas);
  CHECK(net.at(res).slots[1] == sol);

  Network valid;
  ModuleId m1 = valid.add_module(ModuleKind::MAS), s1 = valid.add_module(ModuleKind::SOL);
  ModuleId r1 = valid.add_module(ModuleKind::RES);
  valid.connect(r1, m1, s1);
  CHECK(valid.validate().ok());

  auto rev = net.revision();
  CHECK_ERROR_CODE(net.connect(res2, res, mas), ErrorCode::KindMismatch);
  CHECK_ERROR_CODE(net.connect(res2, mas, mas), ErrorCode::SelfLink);
  CHECK_ERROR_CODE(net.connect(res2, mas, ModuleId{99}), ErrorCode::UnknownId);
  CHECK_ERROR_CODE(net.connect(mas, sol, res), ErrorCode::KindMismatch);
  // ENF has no position to join
  CHECK_ERROR_CODE(net.connect(res2, mas, enf), ErrorCode::KindMismatch);
  CHECK(net.revision() == rev);
  CHECK(net.at(res2).slots[0] == kNoModule);
}

TEST_CASE("attachments") {
  Network net;
  ModuleId mas = net.add_module(ModuleKind::MAS);
  ModuleId sol = net.add_module(ModuleKind::SOL);
  ModuleId res = net.add_module(ModuleKind::RES);
  ModuleId sox = net.add_module(ModuleKind::SOX);
  ModuleId sof = net.add_module(ModuleKind::SOF);
  ModuleId enf = net.add_module(ModuleKind::ENF);
  net.connect(res, mas, sol);
  net.attach(sox, mas);
  net.attach(sof, res);
  net.attach(enf, mas);
  CHECK_ERROR_CODE(net.attach(sox, res), ErrorCode::KindMismatch);
  CHECK_ERROR_CODE(net.attach(sof, mas), ErrorCode::KindMismatch);
  CHECK_ERROR_CODE(net.attach(enf, sox), ErrorCode::KindMismatch);
  CHECK_ERROR_CODE(net.attach(res, mas), ErrorCode::KindMismatch);
  CHECK_ERROR_CODE(net.attach(sox, sox), ErrorCode::KindMismatch);
  CHECK(net.referrers(mas) == std::vector<ModuleId>{res, sox, enf});
  net.disconnect(sox);
  CHECK(net.at(sox).slots[0] == kNoModule);
  CHECK(net.validate().contains(IssueKind::DanglingAttachment, sox));
}

TEST_CASE("set_param semantics") {
  Network net;
  ModuleId mas = net.add_module(ModuleKind::MAS);
  ModuleId res = net.add_module(ModuleKind::RES);
  ModuleId but = net.add_module(ModuleKind::BUT);
  ModuleId lnl = net.add_module(ModuleKind::LNL);

  ModuleId one[] = {res};
  CHECK(net.set_param(one, Param::K, 0.1) == 1);
  CHECK(std::get<double>(net.get_param(res, Param::K)) == 0.1);

  ModuleId m[] = {mas};
  CHECK_ERROR_CODE(net.set_param(m, Param::M, 0.0), ErrorCode::NonPositiveInertia);
  CHECK_ERROR_CODE(net.set_param(m, Param::M, -1.0), ErrorCode::NonPositiveInertia);
  CHECK_ERROR_CODE(net.set_param(m, Param::S, 0.5), ErrorCode::NoSuchParamForKind);
  CHECK_ERROR_CODE(net.get_param(mas, Param::K), ErrorCode::NoSuchParamForKind);
  ModuleId r[] = {res};
  CHECK_ERROR_CODE(net.set_param(r, Param::K, -0.1), ErrorCode::InvalidValue);
  CHECK_ERROR_CODE(net.set_param(r, Param::K, std::nan("")), ErrorCode::InvalidValue);

  // strict refuses mixed selections before touching anything
  ModuleId mixed[] = {res, but, mas};
  auto rev = net.revision();
  CHECK_ERROR_CODE(net.set_param(mixed, Param::K, 0.3), ErrorCode::NoSuchParamForKind);
  CHECK(net.revision() == rev);
  CHECK(std::get<double>(net.get_param(res, Param::K)) == 0.1);
  CHECK(net.set_param(mixed, Param::K, 0.3, SetMode::Lenient) == 2);
  CHECK(std::get<double>(net.get_param(but, Param::K)) == 0.3);
  CHECK(net.revision() == rev + 1);

  ModuleId only_mas[] = {mas};
  rev = net.revision();
  CHECK(net.set_param(only_mas, Param::K, 0.3, SetMode::Lenient) == 0);
  CHECK(net.revision() == rev);

  ModuleId l[] = {lnl};
  CHECK_ERROR_CODE(net.set_param(l, Param::fK, Table{{0.0}, {1.0}}), ErrorCode::MalformedTable);
  CHECK_ERROR_CODE(net.set_param(l, Param::fK, Table{{0.0, 0.0}, {1.0, 2.0}}),
                   ErrorCode::MalformedTable);
  CHECK_ERROR_CODE(net.set_param(l, Param::fK, 1.0), ErrorCode::InvalidValue);
  CHECK(net.set_param(l, Param::fK, Table{{-1.0, 1.0}, {1.0, -1.0}}) == 1);
  CHECK(net.at(lnl).params.fK.eval(0.5) == -0.5);
}

TEST_CASE("table interpolation clamps at the ends") {
  Table t{{0.0, 1.0, 3.0}, {0.0, 2.0, 0.0}};
  CHECK(t.well_formed());
  CHECK(t.eval(-5) == 0.0);
  CHECK(t.eval(0.5) == 1.0);
  CHECK(t.eval(2.0) == 1.0);
  CHECK(t.eval(10) == 0.0);
  CHECK_FALSE(Table{{0.0, std::nan("")}, {0.0, 0.0}}.well_formed());
  CHECK_FALSE((Table{{0.0, 1.0}, {0.0}}.well_formed()));
}

TEST_CASE("remove_module leaves links dangling") {
  Network net;
  ModuleId mas = net.add_module(ModuleKind::MAS);
  ModuleId sol = net.add_module(ModuleKind::SOL);
  ModuleId res = net.add_module(ModuleKind::RES);
  net.connect(res, mas, sol);
  net.remove_module(mas);
  CHECK(net.contains(res));
  CHECK(net.at(res).slots[0] == kNoModule);
  CHECK(net.at(res).slots[1] == sol);
  CHECK(net.validate().contains(IssueKind::DanglingLink, res));
  CHECK_ERROR_CODE(net.remove_module(ModuleId{42}), ErrorCode::UnknownId);
  // ids are never reused
  CHECK(to_u64(net.add_module(ModuleKind::MAS)) == 4);
}

TEST_CASE("revision increases on every mutation") {
  Network net;
  auto r0 = net.revision();
  ModuleId a = net.add_module(ModuleKind::MAS);
  ModuleId b = net.add_module(ModuleKind::SOL);
  ModuleId l = net.add_module(ModuleKind::REF);
  CHECK(net.revision() == r0 + 3);
  net.connect(l, a, b);
  net.move(a, {3, 4});
  ModuleId ids[] = {a};
  net.set_state(ids, StateVar::X0, 0.25);
  CHECK(net.revision() == r0 + 6);
  CHECK(net.get_state(a, StateVar::X0) == 0.25);
  CHECK_ERROR_CODE(net.move(a, {std::nan(""), 0}), ErrorCode::InvalidValue);
  CHECK(net.revision() == r0 + 6);
}

TEST_CASE("validate") {
  Network empty;
  CHECK(empty.validate().ok());

  Network net;
  ModuleId enx = net.add_module(ModuleKind::ENX);
  ModuleId sox = net.add_module(ModuleKind::SOX);
  net.attach(sox, enx);
  auto report = net.validate();
  CHECK(report.contains(IssueKind::UnresolvedSignal, enx));
  net.set_signal(enx, "bow");
  CHECK(net.validate([](std::string_view s) { return s == "bow"; }).ok());
  CHECK_ERROR_CODE(net.set_signal(sox, "bow"), ErrorCode::KindMismatch);
}

TEST_CASE("model keeps labels in step with the network") {
  Model model;
  ModuleId a = model.add_module(ModuleKind::MAS);
  ModuleId b = model.add_module(ModuleKind::MAS);
  ModuleId c = model.add_module(ModuleKind::MAS);
  CHECK(model.labels().labels_of(a) == std::vector<std::string>{"/sys/MAS/1"});
  model.add_label(a, "/x/y");
  model.remove_module(a);
  model.remove_module(b);
  model.remove_module(c);
  CHECK(model.network().size() == 0);
  CHECK(model.labels().label_count() == 0);
  CHECK_FALSE(model.labels().target("/x/y"));
}

TEST_CASE("same edits give the same network") {
  auto build = [] {
    Model m;
    ModuleId a = m.add_module(ModuleKind::CEL, {1, 2});
    ModuleId b = m.add_module(ModuleKind::SOL);
    ModuleId l = m.add_module(ModuleKind::BUT);
    m.connect(l, a, b);
    ModuleId t[] = {l};
    m.set_param(t, Param::S, 0.01);
    m.add_label(a, "/cel");
    m.remove_module(b);
    m.add_module(ModuleKind::MAS);
    return m;
  };
  CHECK(build() == build());
  CHECK(build().network().modules() == build().network().modules());
}
