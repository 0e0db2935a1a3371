#pragma once

#include "rfqprice/dynamics.hpp"
#include "rfqprice/error.hpp"
#include "rfqprice/estimation.hpp"
#include "rfqprice/ftp.hpp"
#include "rfqprice/hamiltonian.hpp"
#include "rfqprice/hjb.hpp"
#include "rfqprice/io.hpp"
#include "rfqprice/linalg.hpp"
#include "rfqprice/microprice.hpp"
#include "rfqprice/mmpp.hpp"
#include "rfqprice/model.hpp"
#include "rfqprice/riccati.hpp"
#include "rfqprice/scurve.hpp"
#include "rfqprice/simulator.hpp"
