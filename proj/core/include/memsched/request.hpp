#pragma once

#include <optional>

#include "memsched/dram.hpp"
#include "memsched/types.hpp"

namespace memsched {

struct MemoryRequest {
  ReqId id = 0;
  AppId app = 0;
  Addr address = 0;  // block address as the core sees it (before partitioning)
  DecodedAddress decoded;
  AccessType type = AccessType::Read;
  Cycle arrival = 0;
  std::optional<Cycle> issued;
  std::optional<Cycle> completed;
  // Row-buffer state the request first found: set by its Activate, or Hit
  // if its row was already open when it was served.
  std::optional<RowStatus> row_status;
  bool marked = false;  // PARBS batch membership
};

}  // namespace memsched
