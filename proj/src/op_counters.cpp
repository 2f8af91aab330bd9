// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/op_counters.hpp"

namespace encctl {

OpCounts& OpCounts::operator+=(const OpCounts& o) {
  enc += o.enc;
  dec += o.dec;
  add += o.add;
  ext_product += o.ext_product;
  automorphism += o.automorphism;
  unpack_ct += o.unpack_ct;
  unpack_pt += o.unpack_pt;
  pack += o.pack;
  unpack_ext_product += o.unpack_ext_product;
  unpack_add += o.unpack_add;
  return *this;
}

namespace internal {

OpCounts*& active_counts() {
  thread_local OpCounts* active = nullptr;
  return active;
}

}  // namespace internal
}  // namespace encctl
