/** Personas stand in for real auth: switching one changes the user_id
 * attached to emitted events and nothing else. The manager flag only
 * gates which buttons are *actionable* locally; the server remains
 * authoritative. */

export interface Persona {
  userId: string;
  displayName: string;
  isManager: boolean;
}

export const DEFAULT_PERSONAS: Persona[] = [
  { userId: "adnan", displayName: "Adnan (Requester)", isManager: false },
  { userId: "caleb", displayName: "Caleb (Questioner)", isManager: false },
  { userId: "prof-lee", displayName: "Prof. Lee (Manager)", isManager: true },
];

const MANAGER_ONLY_ACTIONS = new Set(["approve", "reject"]);

export function buttonEnabled(persona: Persona, buttonAction: string): boolean {
  if (MANAGER_ONLY_ACTIONS.has(buttonAction)) return persona.isManager;
  return true;
}
