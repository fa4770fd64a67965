#pragma once

#include "mpst/rt/capabilities.hpp"
#include "mpst/rt/channel.hpp"
#include "mpst/rt/errors.hpp"
#include "mpst/rt/session.hpp"
#include "mpst/rt/transport.hpp"
#include "mpst/rt/wire.hpp"
