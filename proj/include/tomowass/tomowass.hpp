#pragma once

#include "tomowass/error.hpp"
#include "tomowass/fock.hpp"
#include "tomowass/homodyne.hpp"
#include "tomowass/io.hpp"
#include "tomowass/rng.hpp"
#include "tomowass/special.hpp"
#include "tomowass/states.hpp"
#include "tomowass/tomography.hpp"
#include "tomowass/transport.hpp"
#include "tomowass/version.hpp"
