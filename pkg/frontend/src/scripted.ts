/**
 * The scripted demo session: the canonical policy-update example
 * driven through a console session, used by the conformance tests and
 * the `demo` CLI command.
 */
import { DEFAULT_PERSONAS, Persona } from "./personas.js";
import { SourceMessage } from "./protocol.js";
import { ConsoleSession } from "./session.js";

export const CHANNEL = "C1";

export const SCRIPT: { author: string; ts: string; text: string }[] = [
  {
    author: "caleb",
    ts: "1001.0",
    text: "True. How about deciding whether to submit or not a month ahead?",
  },
  { author: "adnan", ts: "1002.0", text: "Yeah, that sounds safer." },
  {
    author: "adnan",
    ts: "1003.0",
    text: "@CHOIR We aim for a decision to submit a paper or not one month before the deadline.",
  },
];

function persona(userId: string): Persona {
  const found = DEFAULT_PERSONAS.find((p) => p.userId === userId);
  if (!found) throw new Error(`no persona ${userId}`);
  return found;
}

async function settle(session: ConsoleSession, minActions: number, timeoutMs = 10000) {
  const deadline = Date.now() + timeoutMs;
  while (session.actions.length < minActions) {
    if (Date.now() > deadline) {
      throw new Error(
        `timed out waiting for ${minActions} actions, have ${session.actions.length}`,
      );
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

/**
 * Drive mention → selection → discussion → approval and return the
 * flow id. The session must already be started (streaming).
 */
export async function runScriptedScenario(session: ConsoleSession): Promise<string> {
  session.switchPersona(persona("caleb"));
  const m1 = session.say(CHANNEL, SCRIPT[0].text, SCRIPT[0].ts);
  session.switchPersona(persona("adnan"));
  const m2 = session.say(CHANNEL, SCRIPT[1].text, SCRIPT[1].ts);

  const ack = await session.mentionChoir(CHANNEL, SCRIPT[2].text, SCRIPT[2].ts);
  const flowId = ack.flow_id;
  if (!flowId) throw new Error("mention did not open a flow");
  await settle(session, 1);

  const mentionMessage: SourceMessage = {
    channel_id: CHANNEL,
    author_id: "adnan",
    timestamp: SCRIPT[2].ts,
    text: SCRIPT[2].text,
  };
  await session.selectMessages(CHANNEL, flowId, [m1, m2, mentionMessage]);
  await settle(session, 2);

  await session.pressButton(CHANNEL, flowId, "start_discussion");
  await settle(session, 6);

  session.switchPersona(persona("prof-lee"));
  const result = await session.pressButton(CHANNEL, flowId, "approve");
  if (result.blocked || result.error) throw new Error("approval failed");
  await settle(session, 7);
  return flowId;
}
