#include "wbbn/mac/csma_mac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbbn::mac
{

void validate(const MacParams &params)
{
    if (params.cwMin < 1 || params.cwMax < params.cwMin)
    {
        throw std::invalid_argument("MAC contention window needs 1 <= cw_min <= cw_max");
    }
    if (!(params.slot > 0.0) || !(params.sifs > 0.0))
    {
        throw std::invalid_argument("MAC slot and SIFS must be positive");
    }
    if (params.maxRetries < 0 || params.queueCapacity < 1 || params.duplicateWindow < 1)
    {
        throw std::invalid_argument("MAC retries must be >= 0, queue and duplicate window >= 1");
    }
}

int contentionWindow(int failures, int cwMin, int cwMax)
{
    const int doublings = std::max(failures, 0) / 2;
    long long cw = cwMin;
    for (int i = 0; i < doublings && cw < cwMax; ++i)
    {
        cw *= 2;
    }
    return static_cast<int>(std::min<long long>(cw, cwMax));
}

CsmaMac::CsmaMac(sim::Scheduler &scheduler, phy::Medium &medium, const phy::RadioConfig &radio, MacParams params,
                 std::uint64_t seed)
    : m_scheduler(scheduler),
      m_medium(medium),
      m_radio(medium.attach(radio, this)),
      m_node(radio.node),
      m_params(params),
      m_rng(seed, {sim::StreamPurpose::MacBackoff, (radio.channel << 16) | radio.node})
{
    validate(m_params);
    m_state.cw = m_params.cwMin;
    m_state.cwMin = m_params.cwMin;
    m_state.cwMax = m_params.cwMax;
}

double CsmaMac::ackTimeout() const
{
    return m_params.sifs + m_medium.airtime(m_radio, 0) + 2.0 * m_params.slot;
}

std::uint8_t CsmaMac::nextSeq(NodeId dst)
{
    return m_txSeq[dst]++;
}

bool CsmaMac::enqueue(NodeId dst, NetMessage msg)
{
    if (m_queue.size() >= m_params.queueCapacity)
    {
        ++m_counters.dropsQueue;
        if (m_up.queueDrop)
        {
            m_up.queueDrop(msg);
        }
        return false;
    }
    const std::uint8_t seq = nextSeq(dst);
    m_queue.push_back({dst, std::move(msg), seq});
    if (m_phase == Phase::Idle)
    {
        startContention();
    }
    return true;
}

void CsmaMac::startContention()
{
    m_phase = Phase::Backoff;
    m_state.backoff = static_cast<int>(m_rng.uniformInt(1, static_cast<std::uint64_t>(m_state.cw)));
    resumeCountdown();
}

void CsmaMac::resumeCountdown()
{
    if (m_phase != Phase::Backoff || m_counting || m_sendingAck)
    {
        return;
    }
    if (m_medium.isChannelBusy(m_radio) || m_medium.isTransmitting(m_radio))
    {
        return;
    }
    m_counting = true;
    m_countStart = m_scheduler.now();
    m_backoffEvent = m_scheduler.scheduleIn(m_state.backoff * m_params.slot, m_node, sim::EventKind::Timer,
                                            [this] { backoffExpired(); });
}

void CsmaMac::freezeCountdown()
{
    if (!m_counting)
    {
        return;
    }
    const double elapsed = (m_scheduler.now() - m_countStart) / m_params.slot;
    const int slots = static_cast<int>(std::floor(elapsed + 1e-9));
    // Busy on the final slot's CCA: one more idle slot is required.
    m_state.backoff = std::max(1, m_state.backoff - slots);
    m_scheduler.cancel(*m_backoffEvent);
    m_backoffEvent.reset();
    m_counting = false;
}

void CsmaMac::backoffExpired()
{
    m_backoffEvent.reset();
    m_counting = false;
    m_state.backoff = 0;
    transmitHead();
}

void CsmaMac::transmitHead()
{
    const Pending &head = m_queue.front();
    MacFrame frame;
    frame.type = FrameType::Data;
    frame.src = m_node;
    frame.dst = head.dst;
    frame.seq = head.seq;
    frame.payloadBytes = messageBytes(head.msg);
    frame.payload = head.msg;
    ++m_counters.txAttempts;
    if (m_state.retries > 0)
    {
        ++m_counters.retransmissions;
    }
    m_phase = Phase::Transmitting;
    m_medium.transmit(m_radio, std::move(frame));
}

void CsmaMac::onTransmitComplete()
{
    if (m_sendingAck)
    {
        m_sendingAck = false;
        resumeCountdown();
        return;
    }
    if (m_phase != Phase::Transmitting)
    {
        return;
    }
    if (m_queue.front().dst == kBroadcast)
    {
        finishHead(SendOutcome::Success);
        return;
    }
    m_phase = Phase::WaitAck;
    m_ackEvent = m_scheduler.scheduleIn(ackTimeout(), m_node, sim::EventKind::Timer, [this] { ackTimeoutExpired(); });
}

void CsmaMac::ackTimeoutExpired()
{
    m_ackEvent.reset();
    ++m_state.failCount;
    ++m_state.retries;
    m_state.cw = contentionWindow(m_state.failCount, m_params.cwMin, m_params.cwMax);
    if (m_state.retries > m_params.maxRetries)
    {
        ++m_counters.dropsRetry;
        finishHead(SendOutcome::RetryLimit);
        return;
    }
    startContention();
}

void CsmaMac::finishHead(SendOutcome outcome)
{
    Pending head = std::move(m_queue.front());
    m_queue.pop_front();
    m_state.retries = 0;
    m_state.failCount = 0;
    m_state.cw = m_params.cwMin;
    m_phase = Phase::Idle;
    if (outcome == SendOutcome::Success)
    {
        if (m_up.sent)
        {
            m_up.sent(head.dst, head.msg);
        }
    }
    else if (m_up.linkFailure)
    {
        m_up.linkFailure(head.dst, head.msg);
    }
    if (m_phase == Phase::Idle && !m_queue.empty())
    {
        startContention();
    }
}

void CsmaMac::onChannelBusy(bool busy)
{
    if (busy)
    {
        // A countdown ending at this very instant already passed its last CCA.
        if (m_counting && m_countStart + m_state.backoff * m_params.slot - m_scheduler.now() > 1e-12)
        {
            freezeCountdown();
        }
        return;
    }
    resumeCountdown();
}

bool CsmaMac::isDuplicate(NodeId src, std::uint8_t seq)
{
    auto &window = m_seen[src];
    if (std::find(window.begin(), window.end(), seq) != window.end())
    {
        return true;
    }
    window.push_back(seq);
    if (window.size() > m_params.duplicateWindow)
    {
        window.pop_front();
    }
    return false;
}

void CsmaMac::onFrameReceived(const MacFrame &frame)
{
    if (frame.type == FrameType::Ack)
    {
        if (m_phase == Phase::WaitAck && frame.dst == m_node && frame.src == m_queue.front().dst &&
            frame.seq == m_queue.front().seq)
        {
            m_scheduler.cancel(*m_ackEvent);
            m_ackEvent.reset();
            ++m_counters.acksReceived;
            finishHead(SendOutcome::Success);
        }
        return;
    }
    if (frame.isBroadcast())
    {
        ++m_counters.deliveredUp;
        if (m_up.deliver)
        {
            m_up.deliver(frame);
        }
        return;
    }
    if (frame.dst != m_node)
    {
        return;
    }
    const NodeId src = frame.src;
    const std::uint8_t seq = frame.seq;
    m_scheduler.scheduleIn(m_params.sifs, m_node, sim::EventKind::Timer, [this, src, seq] { sendAck(src, seq); });
    if (isDuplicate(src, seq))
    {
        ++m_counters.duplicates;
        return;
    }
    ++m_counters.deliveredUp;
    if (m_up.deliver)
    {
        m_up.deliver(frame);
    }
}

void CsmaMac::sendAck(NodeId to, std::uint8_t seq)
{
    if (m_medium.isTransmitting(m_radio))
    {
        return;
    }
    freezeCountdown();
    m_sendingAck = true;
    MacFrame ack;
    ack.type = FrameType::Ack;
    ack.src = m_node;
    ack.dst = to;
    ack.seq = seq;
    ack.payloadBytes = 0;
    ++m_counters.acksSent;
    m_medium.transmit(m_radio, std::move(ack));
}

} // namespace wbbn::mac
