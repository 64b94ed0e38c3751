#pragma once

#include "kerrfock/common.hpp"
#include "kerrfock/config.hpp"
#include "kerrfock/dynamics.hpp"
#include "kerrfock/fock.hpp"
#include "kerrfock/harness.hpp"
#include "kerrfock/io.hpp"
#include "kerrfock/model.hpp"
#include "kerrfock/path.hpp"
#include "kerrfock/pathopt.hpp"
#include "kerrfock/penalty.hpp"
#include "kerrfock/schedule.hpp"
#include "kerrfock/spectral.hpp"
#include "kerrfock/variational.hpp"
#include "kerrfock/wigner.hpp"
