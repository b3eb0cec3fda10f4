/**
 * Interactive terminal console for the CHOIR gateway.
 *
 * Usage:
 *   node dist/main.js --url http://127.0.0.1:8787          interactive
 *   node dist/main.js --url http://127.0.0.1:8787 demo     scripted session
 *
 * Commands:
 *   /persona <user_id>          switch persona
 *   /say <text>                 post channel chatter (local)
 *   /mention <text>             mention CHOIR with recent context
 *   /select <flow_id> <n,n,..>  select offered messages by number
 *   /press <flow_id> <action>   press a card button
 *   /dm <text>                  ask CHOIR a question
 *   /docs                       list documents
 *   /doc <path>                 show a document
 *   /history <path>             show revision history with context
 *   /quit
 */
import * as readline from "node:readline";

import { GatewayClient } from "./client.js";
import { DEFAULT_PERSONAS } from "./personas.js";
import { runScriptedScenario } from "./scripted.js";
import { ConsoleSession } from "./session.js";

const CHANNEL = "C1";

function parseArgs(argv: string[]): { url: string; command?: string } {
  let url = "http://127.0.0.1:8787";
  let command: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--url") url = argv[++i];
    else command = argv[i];
  }
  return { url, command };
}

async function showHistory(client: GatewayClient, path: string): Promise<string[]> {
  const lines: string[] = [];
  for (const entry of await client.history(path)) {
    const head = `${entry.revision.slice(0, 8)}  ${new Date(entry.author_time * 1000).toISOString()}`;
    if (entry.context) {
      lines.push(
        `${head}  by ${entry.context.requester_id}, approved by ${entry.context.approver_id}`,
      );
      for (const m of entry.context.messages) lines.push(`    <${m.author_id}> ${m.text}`);
    } else {
      lines.push(`${head}  (manual commit)`);
    }
  }
  return lines;
}

async function main() {
  const { url, command } = parseArgs(process.argv.slice(2));
  const client = new GatewayClient(url);
  if (!(await client.health())) {
    console.error(`cannot reach service at ${url}`);
    process.exit(1);
  }
  const session = new ConsoleSession(client, DEFAULT_PERSONAS[0], { ansi: true });
  let printed = 0;
  const flush = () => {
    for (; printed < session.transcript.length; printed++) {
      console.log(session.transcript[printed]);
    }
  };
  session.start();
  const poller = setInterval(flush, 100);

  if (command === "demo") {
    const flowId = await runScriptedScenario(session);
    flush();
    console.log(`flow ${flowId}: ${(await client.flow(flowId)).state}`);
    for (const line of await showHistory(client, "echolabs-policy.md")) console.log(line);
    clearInterval(poller);
    await session.stop();
    return;
  }

  const rl = readline.createInterface({ input: process.stdin, output: process.stdout });
  rl.setPrompt(`${session.persona.userId}> `);
  rl.prompt();
  rl.on("line", (raw) => {
    void (async () => {
      const line = raw.trim();
      const [cmd, ...rest] = line.split(/\s+/);
      const tail = rest.join(" ");
      try {
        if (cmd === "/quit") {
          rl.close();
          return;
        } else if (cmd === "/persona") {
          const next = DEFAULT_PERSONAS.find((p) => p.userId === rest[0]);
          if (next) session.switchPersona(next);
          else console.log(`personas: ${DEFAULT_PERSONAS.map((p) => p.userId).join(", ")}`);
        } else if (cmd === "/say") {
          session.say(CHANNEL, tail);
        } else if (cmd === "/mention") {
          const ack = await session.mentionChoir(CHANNEL, `@CHOIR ${tail}`);
          console.log(`flow: ${ack.flow_id}`);
        } else if (cmd === "/select") {
          const [flowId, numbers] = rest;
          const offered = session.recentMessages(CHANNEL);
          const picked = numbers.split(",").map((n) => offered[Number(n) - 1]).filter(Boolean);
          await session.selectMessages(CHANNEL, flowId, picked);
        } else if (cmd === "/press") {
          const [flowId, action] = rest;
          await session.pressButton(CHANNEL, flowId, action);
        } else if (cmd === "/dm") {
          const ack = await session.directMessage(tail);
          console.log(`flow: ${ack.flow_id}`);
        } else if (cmd === "/docs") {
          for (const doc of await client.documents()) console.log(doc);
        } else if (cmd === "/doc") {
          console.log((await client.document(rest[0])).content);
        } else if (cmd === "/history") {
          for (const out of await showHistory(client, rest[0])) console.log(out);
        } else if (line) {
          console.log("unknown command; see header of main.ts for help");
        }
      } catch (error) {
        console.error(`error: ${(error as Error).message}`);
      }
      flush();
      rl.setPrompt(`${session.persona.userId}> `);
      rl.prompt();
    })();
  });
  rl.on("close", () => {
    clearInterval(poller);
    void session.stop().then(() => process.exit(0));
  });
}

void main();
